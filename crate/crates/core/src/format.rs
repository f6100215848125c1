//! Text encodings shared by every CSV the crate emits.

/// 17 significant digits in scientific notation, enough to round-trip any
/// `f64` exactly through `str::parse`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Joins a header and rows of numbers into CSV text.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(
            csv_table(&["a", "b"], vec![vec![1.0, -2.0]]),
            "a,b\n1.0000000000000000e0,-2.0000000000000000e0\n"
        );
    }

    proptest! {
        #[test]
        fn round_trips(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back: f64 = fmt_f64(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
