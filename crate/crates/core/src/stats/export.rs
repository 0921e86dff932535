//! CSV matrices for external plotting. Every file carries a header row.

use std::io::{self, Write};

use super::{Histogram, Spectrum};

pub fn write_histogram_csv<W: Write>(mut w: W, hist: &Histogram) -> io::Result<()> {
    writeln!(w, "bin_start,bin_end,count")?;
    for (lo, hi, c) in hist.bins() {
        writeln!(w, "{lo},{hi},{c}")?;
    }
    Ok(())
}

/// Long format: one row per `(window, lag)`.
pub fn write_acf_csv<W: Write>(mut w: W, windows: &[(String, Vec<f64>)]) -> io::Result<()> {
    writeln!(w, "window,lag,r")?;
    for (label, r) in windows {
        for (lag, v) in r.iter().enumerate() {
            writeln!(w, "{label},{lag},{v}")?;
        }
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(mut w: W, spectrum: &Spectrum) -> io::Result<()> {
    writeln!(w, "freq_hz,amplitude")?;
    for (f, a) in spectrum.freqs_hz.iter().zip(&spectrum.amplitudes) {
        writeln!(w, "{f},{a}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_csv_layout() {
        let h = Histogram::from_values(&[1.0, 1.0, 2.0], 1.0).unwrap();
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &h).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "bin_start,bin_end,count\n1,2,2\n2,3,1\n");
    }

    #[test]
    fn acf_csv_layout() {
        let mut buf = Vec::new();
        write_acf_csv(&mut buf, &[("d0".into(), vec![1.0, 0.5])]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "window,lag,r\nd0,0,1\nd0,1,0.5\n");
    }
}
