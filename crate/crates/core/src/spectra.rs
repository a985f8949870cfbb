//! Transmission, reflection and loss spectra over the input detuning, and
//! reflection peak detection.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SpinState, ValidatedParams};
use crate::steady_state::solve_general;

/// Default peak prominence threshold, as a fraction of max R.
pub const DEFAULT_PROMINENCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Input detuning δ = ω_l − ω_c, strictly increasing.
    pub delta: Vec<f64>,
    pub transmission: Vec<f64>,
    pub reflection: Vec<f64>,
    pub loss: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn step(&self) -> f64 {
        if self.delta.len() < 2 {
            0.0
        } else {
            self.delta[1] - self.delta[0]
        }
    }

    /// Index of the grid point closest to `delta`.
    pub fn nearest(&self, delta: f64) -> usize {
        let mut best = 0;
        for (i, d) in self.delta.iter().enumerate() {
            if (d - delta).abs() < (self.delta[best] - delta).abs() {
                best = i;
            }
        }
        best
    }
}

/// Uniform grid of `n_points` detunings from `delta_min` to `delta_max`
/// inclusive.
pub fn uniform_grid(delta_min: f64, delta_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points, got {n_points}"
        )));
    }
    if !(delta_min < delta_max) || !delta_min.is_finite() || !delta_max.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "need finite delta_min < delta_max, got [{delta_min}, {delta_max}]"
        )));
    }
    let step = (delta_max - delta_min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|k| {
            if k == n_points - 1 {
                delta_max
            } else {
                delta_min + k as f64 * step
            }
        })
        .collect())
}

/// Evaluate the steady state on a uniform detuning grid around the mean
/// cavity frequency. Points are computed in parallel and assembled in grid
/// order.
pub fn sweep(
    params: &ValidatedParams,
    spin: SpinState,
    delta_min: f64,
    delta_max: f64,
    n_points: usize,
) -> Result<Spectrum> {
    let delta = uniform_grid(delta_min, delta_max, n_points)?;
    let omega_c = params.raw().omega_c();
    let points = delta
        .par_iter()
        .map(|&d| {
            let s = solve_general(params, omega_c + d, spin).map_err(|e| match e {
                Error::Singular { .. } => Error::Singular {
                    omega_l: omega_c + d,
                },
                other => other,
            })?;
            Ok((s.transmittance(), s.reflectance(), s.total_loss()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut transmission, mut reflection, mut loss) = (
        Vec::with_capacity(n_points),
        Vec::with_capacity(n_points),
        Vec::with_capacity(n_points),
    );
    for (t, r, l) in points {
        transmission.push(t);
        reflection.push(r);
        loss.push(l);
    }
    Ok(Spectrum {
        delta,
        transmission,
        reflection,
        loss,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub delta: f64,
    pub height: f64,
    pub prominence: f64,
    pub index: usize,
}

/// Local maxima of R in order of detuning, keeping those with prominence
/// of at least `min_prominence * max(R)`. A flat run of equal values with
/// lower neighbors on both sides counts once, at its middle.
pub fn find_peaks(spec: &Spectrum, min_prominence: f64) -> Vec<Peak> {
    let r = &spec.reflection;
    let n = r.len();
    if n < 3 {
        return Vec::new();
    }
    let r_max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = min_prominence * r_max;

    let mut peaks = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if r[i] > r[i - 1] {
            // walk across a possible plateau
            let start = i;
            let mut end = i;
            while end + 1 < n && r[end + 1] == r[i] {
                end += 1;
            }
            if end + 1 < n && r[end + 1] < r[i] {
                let index = (start + end) / 2;
                let prominence = prominence(r, start, end);
                if prominence >= threshold {
                    peaks.push(Peak {
                        delta: spec.delta[index],
                        height: r[index],
                        prominence,
                        index,
                    });
                }
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Height above the higher of the two bases, each base being the minimum
/// between the peak and the nearest strictly higher sample (or the edge).
fn prominence(r: &[f64], start: usize, end: usize) -> f64 {
    let h = r[start];
    let mut left_min = h;
    for k in (0..start).rev() {
        if r[k] > h {
            break;
        }
        left_min = left_min.min(r[k]);
    }
    let mut right_min = h;
    for &v in &r[end + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub delta: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
    #[serde(rename = "L")]
    pub loss: f64,
}

/// Write the spectrum as CSV with header `delta,T,R,L`. Floats are
/// written in shortest round-trip form.
pub fn write_csv<W: Write>(spec: &Spectrum, writer: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for i in 0..spec.len() {
        w.serialize(SpectrumRow {
            delta: spec.delta[i],
            transmission: spec.transmission[i],
            reflection: spec.reflection[i],
            loss: spec.loss[i],
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit(spec: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_csv(spec, &mut buf).map_err(|e| Error::csv(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Spectrum> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut spec = Spectrum {
        delta: Vec::new(),
        transmission: Vec::new(),
        reflection: Vec::new(),
        loss: Vec::new(),
    };
    for row in reader.deserialize::<SpectrumRow>() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        spec.delta.push(row.delta);
        spec.transmission.push(row.transmission);
        spec.reflection.push(row.reflection);
        spec.loss.push(row.loss);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;
    use num_complex::Complex64;

    fn fig3(kappa0: f64, g: f64) -> ValidatedParams {
        SystemParams::symmetric(
            kappa0,
            20.0 * kappa0,
            Complex64::new(g, 0.0),
            Complex64::new(0.0, 0.0),
            kappa0 / 10.0,
        )
        .validate()
        .unwrap()
    }

    fn from_reflection(r: &[f64]) -> Spectrum {
        Spectrum {
            delta: (0..r.len()).map(|k| k as f64).collect(),
            transmission: vec![0.0; r.len()],
            reflection: r.to_vec(),
            loss: vec![0.0; r.len()],
        }
    }

    #[test]
    fn grid_validation() {
        assert!(uniform_grid(0.0, 1.0, 1).is_err());
        assert!(uniform_grid(1.0, 1.0, 5).is_err());
        assert!(uniform_grid(0.0, f64::NAN, 5).is_err());
        let g = uniform_grid(-2.0, 2.0, 5).unwrap();
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn bare_cavity_dip() {
        let (k0, k1) = (0.5, 4.0);
        let p = SystemParams::symmetric(
            k0,
            k1,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            1.0,
        )
        .validate()
        .unwrap();
        let s = sweep(&p, SpinState::Down, -20.0, 20.0, 401).unwrap();
        assert!(s.reflection.iter().all(|&r| r < 1e-24));
        let mid = s.nearest(0.0);
        let expected = ((k1 - k0) / (k0 + k1)).powi(2);
        assert!((s.transmission[mid] - expected).abs() < 1e-14);
        assert!(s.transmission[0] > 0.95);
        for i in 0..s.len() {
            assert!((s.transmission[i] + s.reflection[i] + s.loss[i] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fig3_single_spin_reflection_at_resonance() {
        let s = sweep(&fig3(1.0, 10.0), SpinState::Up, -40.0, 40.0, 801).unwrap();
        let mid = s.nearest(0.0);
        assert_eq!(s.delta[mid], 0.0);
        assert!(s.transmission[mid] < 1e-3);
        assert!((s.reflection[mid] - 0.870).abs() < 5e-3);
    }

    #[test]
    fn decoupled_waveguide_is_transparent() {
        let p = SystemParams::symmetric(
            0.5,
            0.0,
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            0.1,
        )
        .validate()
        .unwrap();
        let s = sweep(&p, SpinState::Up, -10.0, 10.0, 101).unwrap();
        assert!(s.transmission.iter().all(|&t| (t - 1.0).abs() < 1e-15));
        assert!(s.reflection.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn spectrum_symmetric_about_resonance() {
        let s = sweep(&fig3(1.0, 10.0), SpinState::Up, -30.0, 30.0, 601).unwrap();
        let n = s.len();
        for i in 0..n {
            assert!((s.reflection[i] - s.reflection[n - 1 - i]).abs() < 1e-10);
            assert!((s.transmission[i] - s.transmission[n - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn three_resolved_peaks_in_strong_coupling() {
        // g well above the total cavity decay 21·κ0 resolves the dressed modes
        let g = 200.0;
        let s = sweep(&fig3(1.0, g), SpinState::Up, -300.0, 300.0, 601).unwrap();
        let peaks = find_peaks(&s, DEFAULT_PROMINENCE);
        assert_eq!(peaks.len(), 3, "{peaks:?}");
        let step = s.step();
        for (peak, target) in peaks.iter().zip([-g, 0.0, g]) {
            assert!(
                (peak.delta - target).abs() <= step + 1e-9,
                "{peak:?} vs {target}"
            );
        }
    }

    #[test]
    fn peaks_merge_when_decay_grows() {
        let g = 200.0;
        let s = sweep(&fig3(10.0, g), SpinState::Up, -600.0, 600.0, 1201).unwrap();
        let peaks = find_peaks(&s, DEFAULT_PROMINENCE);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].delta, 0.0);
    }

    #[test]
    fn peak_count_transitions_monotonically() {
        let g = 200.0;
        let mut counts = Vec::new();
        for k in 0..60 {
            let scale = 1.0 + k as f64 * 0.25;
            let s = sweep(&fig3(scale, g), SpinState::Up, -600.0, 600.0, 2401).unwrap();
            counts.push(find_peaks(&s, DEFAULT_PROMINENCE).len());
        }
        assert_eq!(counts[0], 3);
        assert_eq!(*counts.last().unwrap(), 1);
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
        assert!(counts.iter().all(|&c| c == 1 || c == 3), "{counts:?}");
    }

    #[test]
    fn grid_refinement_keeps_peaks() {
        let g = 200.0;
        let coarse = sweep(&fig3(1.0, g), SpinState::Up, -300.0, 300.0, 301).unwrap();
        let fine = sweep(&fig3(1.0, g), SpinState::Up, -300.0, 300.0, 601).unwrap();
        let a = find_peaks(&coarse, DEFAULT_PROMINENCE);
        let b = find_peaks(&fine, DEFAULT_PROMINENCE);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.delta - y.delta).abs() <= coarse.step());
        }
    }

    #[test]
    fn monotone_spectrum_has_no_peaks() {
        let s = from_reflection(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert!(find_peaks(&s, 0.0).is_empty());
        assert!(find_peaks(&from_reflection(&[0.5, 0.4]), 0.0).is_empty());
    }

    #[test]
    fn plateau_collapses_to_midpoint() {
        let s = from_reflection(&[0.0, 1.0, 1.0, 1.0, 0.0, 0.2, 0.0]);
        let peaks = find_peaks(&s, 0.0);
        assert_eq!(peaks.len(), 2);
        assert_eq!(peaks[0].index, 2);
        assert_eq!(peaks[1].index, 5);
        // the small bump is removed by a 50% prominence threshold
        assert_eq!(find_peaks(&s, 0.5).len(), 1);
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = sweep(&fig3(1.0, 10.0), SpinState::Up, -1.0, 1.0, 3).unwrap();
        emit(&s, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "delta,T,R,L");
        let back = read_csv(&path).unwrap();
        assert_eq!(back, s);

        let path2 = dir.path().join("s2.csv");
        emit(&s, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );

        assert!(matches!(
            emit(&s, dir.path().join("missing/x.csv")),
            Err(Error::Io { .. })
        ));
    }
}
