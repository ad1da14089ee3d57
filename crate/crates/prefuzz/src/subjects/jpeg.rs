use crate::feedback::Verdict;

/// The marker table: every chunk must be one of these two-byte pairs.
const MARKERS: &[[u8; 2]] = &[
    [0xff, 0xd8], // SOI
    [0xff, 0xc0], // SOF0
    [0xff, 0xc2], // SOF2
    [0xff, 0xc4], // DHT
    [0xff, 0xdb], // DQT
    [0xff, 0xdd], // DRI
    [0xff, 0xda], // SOS
    [0xff, 0xd0], // RST0
    [0xff, 0xe0], // APP0
    [0xff, 0xd9], // EOI
];

/// Miniature frame: SOI, then APP0, then EOI, and nothing after.
const FRAME: &[[u8; 2]] = &[[0xff, 0xd8], [0xff, 0xe0], [0xff, 0xd9]];

/// Reads two-byte chunks. A half-filled chunk is incomplete no matter what
/// its first byte is, so failure feedback is deferred to chunk boundaries
/// and the explorer has to backtrack through accepted-then-dead-end bytes.
pub fn jpeg_marker_validate(input: &[u8]) -> Verdict {
    frame_walk(input, false)
}

/// Same framing, but an invalid chunk reports the offset of its first byte
/// as the failure index.
pub fn jpeg_marker_validate_indexed(input: &[u8]) -> Verdict {
    frame_walk(input, true)
}

fn frame_walk(input: &[u8], with_index: bool) -> Verdict {
    let mut offset = 0;
    let mut slot = 0;
    loop {
        let rest = &input[offset..];
        if rest.is_empty() {
            return if slot == FRAME.len() {
                Verdict::Complete
            } else {
                Verdict::Incomplete
            };
        }
        if slot == FRAME.len() {
            // Bytes after a closed frame.
            return fail(with_index, offset);
        }
        if rest.len() < 2 {
            return Verdict::Incomplete;
        }
        let chunk = [rest[0], rest[1]];
        if !MARKERS.contains(&chunk) || chunk != FRAME[slot] {
            return fail(with_index, offset);
        }
        offset += 2;
        slot += 1;
    }
}

fn fail(with_index: bool, offset: usize) -> Verdict {
    if with_index {
        Verdict::incorrect_at(offset)
    } else {
        Verdict::incorrect()
    }
}
