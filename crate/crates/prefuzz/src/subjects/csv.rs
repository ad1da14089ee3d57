use crate::feedback::Verdict;

/// Any byte sequence is a valid line in progress; a trailing newline makes
/// it complete. Never answers incorrect.
pub fn csv_validate(input: &[u8]) -> Verdict {
    if input.last() == Some(&b'\n') {
        Verdict::Complete
    } else {
        Verdict::Incomplete
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newline_terminated_inputs_are_complete() {
        assert_eq!(csv_validate(b"a,b,c\n"), Verdict::Complete);
        assert_eq!(csv_validate(b"\n"), Verdict::Complete);
        assert_eq!(csv_validate(b"x\ny\n"), Verdict::Complete);
    }

    #[test]
    fn everything_else_is_incomplete_never_incorrect() {
        assert_eq!(csv_validate(b""), Verdict::Incomplete);
        assert_eq!(csv_validate(b"a,b"), Verdict::Incomplete);
        assert_eq!(csv_validate(&[0x00, 0xff, 0x7f]), Verdict::Incomplete);
    }
}
