use crate::feedback::Verdict;

/// Line-oriented INI miniature: `[section]` header lines and free-form
/// lines. Only structurally impossible bytes inside a header are incorrect;
/// every other byte keeps the input a valid prefix. Complete at any line
/// boundary after at least one line.
pub fn ini_validate(input: &[u8]) -> Verdict {
    let mut i = 0;
    loop {
        if i == input.len() {
            return if i == 0 {
                Verdict::Incomplete
            } else {
                Verdict::Complete
            };
        }
        if input[i] == b'[' {
            i += 1;
            let name_start = i;
            // Section name: anything except '[', ']' and newline.
            loop {
                match input.get(i) {
                    None => return Verdict::Incomplete,
                    Some(&b'\n') | Some(&b'[') => return Verdict::incorrect(),
                    Some(&b']') => break,
                    Some(_) => i += 1,
                }
            }
            if i == name_start {
                return Verdict::incorrect();
            }
            i += 1;
            // A closed header admits only the line terminator.
            match input.get(i) {
                None => return Verdict::Incomplete,
                Some(&b'\n') => i += 1,
                Some(_) => return Verdict::incorrect(),
            }
        } else {
            // Free-form line (key=value, comment, blank): runs to newline.
            loop {
                match input.get(i) {
                    None => return Verdict::Incomplete,
                    Some(&b'\n') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_at_line_boundaries() {
        assert_eq!(ini_validate(b"a=1\n"), Verdict::Complete);
        assert_eq!(ini_validate(b"[sec]\n"), Verdict::Complete);
        assert_eq!(ini_validate(b"[sec]\nkey=value\n"), Verdict::Complete);
        assert_eq!(ini_validate(b"\n"), Verdict::Complete);
    }

    #[test]
    fn mid_line_is_incomplete() {
        assert_eq!(ini_validate(b""), Verdict::Incomplete);
        assert_eq!(ini_validate(b"key=val"), Verdict::Incomplete);
        assert_eq!(ini_validate(b"[se"), Verdict::Incomplete);
        assert_eq!(ini_validate(b"[sec]"), Verdict::Incomplete);
    }

    #[test]
    fn only_malformed_headers_are_incorrect() {
        assert_eq!(ini_validate(b"[se\n"), Verdict::incorrect());
        assert_eq!(ini_validate(b"[a[b]\n"), Verdict::incorrect());
        assert_eq!(ini_validate(b"[]\n"), Verdict::incorrect());
        assert_eq!(ini_validate(b"[sec]x"), Verdict::incorrect());
        // Non-header lines accept anything up to the newline.
        assert_eq!(ini_validate(b"a]b=[weird\n"), Verdict::Complete);
    }
}
