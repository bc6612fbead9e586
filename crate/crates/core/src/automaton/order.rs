use std::cmp::Ordering;

/// Total order on state and label names.
///
/// All-digit names sort numerically and come before every other name;
/// everything else sorts by plain string comparison.
pub fn compare_names(a: &str, b: &str) -> Ordering {
    match (is_numeral(a), is_numeral(b)) {
        (true, true) => {
            let ta = a.trim_start_matches('0');
            let tb = b.trim_start_matches('0');
            ta.len()
                .cmp(&tb.len())
                .then_with(|| ta.cmp(tb))
                .then_with(|| a.len().cmp(&b.len()))
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.cmp(b),
    }
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}
