use crate::feedback::Verdict;

/// Length-delimited payload: the first two bytes are a big-endian length N,
/// and exactly N payload bytes must follow.
pub fn length_field_validate(input: &[u8]) -> Verdict {
    if input.len() < 2 {
        return Verdict::Incomplete;
    }
    let n = ((input[0] as usize) << 8) | input[1] as usize;
    match input.len().cmp(&(2 + n)) {
        std::cmp::Ordering::Less => Verdict::Incomplete,
        std::cmp::Ordering::Equal => Verdict::Complete,
        std::cmp::Ordering::Greater => Verdict::incorrect(),
    }
}
