//! CSV writers. Headers are part of the tool's contract:
//! decoherence files carry `t,re_F,im_F,abs_F[,stderr_re,stderr_im]`,
//! coherence files carry `t,C_l1`. Floats are printed with 17 significant
//! digits so a round-trip through text is lossless, and lines always end
//! with a bare LF so identical runs produce identical bytes.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rtn_dephase::molecule::CoherenceSeries;
use rtn_dephase::DecoherenceSeries;

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn decoherence_csv(series: &DecoherenceSeries) -> String {
    let mut out = String::new();
    let with_err = series.stderr().is_some();
    out.push_str(if with_err {
        "t,re_F,im_F,abs_F,stderr_re,stderr_im\n"
    } else {
        "t,re_F,im_F,abs_F\n"
    });
    for (k, (&t, v)) in series.times().iter().zip(series.values()).enumerate() {
        out.push_str(&format_float(t));
        for field in [v.re, v.im, v.norm()] {
            out.push(',');
            out.push_str(&format_float(field));
        }
        if let Some(errs) = series.stderr() {
            for field in [errs[k].re, errs[k].im] {
                out.push(',');
                out.push_str(&format_float(field));
            }
        }
        out.push('\n');
    }
    out
}

pub fn coherence_csv(series: &CoherenceSeries) -> String {
    let mut out = String::from("t,C_l1\n");
    for (&t, &c) in series.times.iter().zip(&series.values) {
        out.push_str(&format_float(t));
        out.push(',');
        out.push_str(&format_float(c));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating output directory {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rtn_dephase::{Backend, StdErr};

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.0, 1.0, -0.12345678901234567, 1e-300, std::f64::consts::PI] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn decoherence_header_shapes() {
        let times = vec![0.0, 1.0];
        let values = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.25)];
        let plain =
            DecoherenceSeries::new(times.clone(), values.clone(), Backend::ClosedForm).unwrap();
        let csv = decoherence_csv(&plain);
        assert!(csv.starts_with("t,re_F,im_F,abs_F\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(!csv.contains('\r'));

        let errs = vec![StdErr { re: 0.0, im: 0.0 }; 2];
        let mc =
            DecoherenceSeries::with_stderr(times, values, Backend::MonteCarlo, Some(errs)).unwrap();
        assert!(decoherence_csv(&mc).starts_with("t,re_F,im_F,abs_F,stderr_re,stderr_im\n"));
    }
}
