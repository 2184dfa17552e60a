use std::io::Write;

use privsel::scenarios::Table;

/// 12 significant digits, `nan` for missing values.
pub fn number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-3..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent");
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}

pub fn write_csv(out: &mut dyn Write, columns: &[String], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(out, "{}", columns.join(","))?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|&v| number(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_table(out: &mut dyn Write, t: &Table) -> std::io::Result<()> {
    write_csv(out, &t.columns, &t.rows)
}

#[cfg(test)]
mod tests {
    use super::number;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(number(1e-6), "1e-6");
        assert_eq!(number(2.924272104856407e-6), "2.92427210486e-6");
        assert_eq!(number(0.0123456789012345), "0.0123456789012");
        assert_eq!(number(1.35e-13), "1.35e-13");
        assert_eq!(number(14063.0), "14063");
        assert_eq!(number(f64::NAN), "nan");
        assert_eq!(number(-0.5), "-0.5");
        assert_eq!(number(3.0), "3");
    }
}
