use crate::feedback::Verdict;

/// Accepts exactly `HELLO`.
///
/// The first three bytes are checked one at a time with immediate feedback;
/// bytes 3-4 are compared as a single two-byte chunk, so any byte at
/// position 3 reads as incomplete until position 4 arrives. That deferred
/// comparison is what forces the explorer to backtrack.
pub fn hello_validate(input: &[u8]) -> Verdict {
    const HEAD: &[u8] = b"HEL";
    for (i, &want) in HEAD.iter().enumerate() {
        match input.get(i) {
            None => return Verdict::Incomplete,
            Some(&got) if got != want => return Verdict::incorrect(),
            Some(_) => {}
        }
    }
    if input.len() < 5 {
        return Verdict::Incomplete;
    }
    if &input[3..5] != b"LO" || input.len() > 5 {
        return Verdict::incorrect();
    }
    Verdict::Complete
}
