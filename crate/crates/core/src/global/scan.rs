//! Sup-norm scans of `|phi|` over the generating domain.
//!
//! For fixed `y` the expansion is a trigonometric polynomial in `x` of period
//! `N^2`, so a whole row `x_j = j N^2 / L` is one inverse FFT of the terms
//! binned by `m mod L`. The binning is exact at the grid points.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::arch::{kernel_peak, ArchParams};
use super::coeffs::{CoefficientSource, CoefficientTable};
use super::expansion::{Expansion, ExpansionConfig, Y_FLOOR};
use super::ramified::RamifiedData;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct GridSpec {
    pub y_min: f64,
    pub y_max: f64,
    pub rows_per_decade: u32,
    /// Points per period in `x`; rows whose expansion is longer than this
    /// are evaluated on a dyadic refinement of the same grid.
    pub x_steps: usize,
}

impl GridSpec {
    /// `y` from `sqrt(3)/2` to `N^2 T^{1.1}` at 256 rows per decade, and
    /// `64 N^2` points in `x`.
    pub fn standard(level: u64, arch: &ArchParams) -> Self {
        let n2 = (level * level) as f64;
        GridSpec {
            y_min: Y_FLOOR,
            y_max: n2 * arch.big_t().powf(1.1),
            rows_per_decade: 256,
            x_steps: 64 * (level * level) as usize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_min >= Y_FLOOR) || !(self.y_max >= self.y_min) || !self.y_max.is_finite() {
            return Err(Error::Config(format!(
                "y range [{}, {}] must lie in [sqrt(3)/2, inf)",
                self.y_min, self.y_max
            )));
        }
        if self.rows_per_decade == 0 || self.x_steps == 0 {
            return Err(Error::Config("grid resolutions must be positive".into()));
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<f64> {
        let decades = (self.y_max / self.y_min).log10();
        let count = (decades * self.rows_per_decade as f64).ceil() as usize;
        let mut out: Vec<f64> = (0..=count)
            .map(|i| self.y_min * 10f64.powf(i as f64 / self.rows_per_decade as f64))
            .collect();
        if let Some(last) = out.last_mut() {
            *last = last.min(self.y_max);
        }
        out
    }
}

/// One scanned row.
#[derive(Clone, Debug, Serialize)]
pub struct RowSample {
    pub class: usize,
    pub y: f64,
    pub cutoff: u64,
    /// Points per period actually used (`x_steps` times a power of 2).
    pub x_points: usize,
    pub sup: f64,
    pub argmax_x: f64,
    /// `max_m |term(m)|` on this row.
    pub witness: f64,
    pub witness_m: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub label: String,
    pub b: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Argmax {
    pub x: f64,
    pub y: f64,
    pub class: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub value: f64,
    pub m: i64,
    pub y: f64,
    pub class: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub level: u64,
    /// `C = N^4`.
    pub conductor: f64,
    pub arch: ArchParams,
    /// `h(pi_infty)`.
    pub h: f64,
    pub grid: GridSpec,
    pub classes: Vec<ClassSummary>,
    pub sup: f64,
    pub argmax: Argmax,
    /// `sup / (C^{1/8} h)`.
    pub ratio: f64,
    /// `sup` over the upper-bound normalization: `C^{1/8} k^{1/4}`, or
    /// `C^{1/8} T^{1/2} min(C^{delta/2} T^delta, C^{1/32})` for Maass forms.
    pub ratio_upper: f64,
    pub witness: Witness,
    /// `witness / (C^{1/8} h)`.
    pub witness_ratio: f64,
    /// `sup_y kappa(y) / c_infty`.
    pub kernel_peak: f64,
    pub rows: Vec<RowSample>,
}

impl ScanReport {
    /// Per-row samples as CSV.
    pub fn rows_csv(&self) -> String {
        let mut s = String::from("class,y,cutoff,x_points,sup,argmax_x,witness,witness_m\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.12e},{},{},{:.12e},{:.12e},{:.12e},{}\n",
                r.class, r.y, r.cutoff, r.x_points, r.sup, r.argmax_x, r.witness, r.witness_m
            ));
        }
        s
    }
}

/// Scans `|phi(n(x) a(y) g_f)|` for each class of `g_f` (given as its
/// ramified data) over the grid.
pub fn scan_supnorm(
    grid: &GridSpec,
    classes: &[RamifiedData],
    source: &CoefficientSource,
    arch: &ArchParams,
    cfg: &ExpansionConfig,
) -> Result<ScanReport> {
    grid.validate()?;
    let first = classes
        .first()
        .ok_or_else(|| Error::Config("no g_f classes to scan".into()))?;
    let level = first.level;
    if classes.iter().any(|c| c.level != level) {
        return Err(Error::Config("classes at different levels".into()));
    }
    if grid.y_min < cfg.y_floor {
        return Err(Error::Config("grid starts below the y floor".into()));
    }
    let ys = grid.rows();
    let exps: Vec<Expansion> = classes
        .iter()
        .map(|c| Expansion::new(c, *arch, *cfg))
        .collect::<Result<_>>()?;
    let mut size = 16 * exps[0].initial_cutoff(grid.y_min);
    let rows = loop {
        let table = source.table(size)?;
        let jobs: Vec<(usize, f64)> = (0..classes.len())
            .flat_map(|c| ys.iter().map(move |&y| (c, y)))
            .collect();
        let res: Result<Vec<RowSample>> = jobs
            .par_iter()
            .map(|&(c, y)| scan_row(&exps[c], c, y, grid.x_steps, &table))
            .collect();
        match res {
            Err(Error::Coverage(m)) if m > table.max_m() => size = 2 * m,
            other => break other?,
        }
    };

    let best = rows
        .iter()
        .fold(None::<&RowSample>, |best, r| match best {
            None => Some(r),
            Some(b) if r.sup > b.sup => Some(r),
            Some(b) if r.sup == b.sup && (r.y, r.argmax_x) < (b.y, b.argmax_x) => Some(r),
            keep => keep,
        })
        .expect("at least one row");
    let wit = rows
        .iter()
        .fold(None::<&RowSample>, |best, r| match best {
            None => Some(r),
            Some(b) if r.witness > b.witness => Some(r),
            keep => keep,
        })
        .expect("at least one row");

    let c = (level as f64).powi(4);
    let h = arch.h();
    let c8 = c.powf(0.125);
    let upper = match *arch {
        ArchParams::Holomorphic { .. } => c8 * h,
        ArchParams::Maass { .. } => {
            let t = arch.big_t();
            let d = source.delta_pi;
            c8 * t.sqrt() * (c.powf(d / 2.0) * t.powf(d)).min(c.powf(1.0 / 32.0))
        }
    };
    Ok(ScanReport {
        level,
        conductor: c,
        arch: *arch,
        h,
        grid: grid.clone(),
        classes: classes
            .iter()
            .map(|r| ClassSummary {
                label: r.locals.iter().map(|l| format!("{}:{}", l.mv.p(), l.label)).collect::<Vec<_>>().join(","),
                b: r.b,
            })
            .collect(),
        sup: best.sup,
        argmax: Argmax {
            x: best.argmax_x,
            y: best.y,
            class: best.class,
        },
        ratio: best.sup / (c8 * h),
        ratio_upper: best.sup / upper,
        witness: Witness {
            value: wit.witness,
            m: wit.witness_m,
            y: wit.y,
            class: wit.class,
        },
        witness_ratio: wit.witness / (c8 * h),
        kernel_peak: kernel_peak(arch)?,
        rows,
    })
}

/// One row: grow the cutoff until the l1 mass of the terms in `(R, 2R]`
/// is below `rel_tol` times the row maximum, which bounds the change at
/// every `x`.
fn scan_row(exp: &Expansion, class: usize, y: f64, x_steps: usize, table: &CoefficientTable) -> Result<RowSample> {
    exp.check_y(y)?;
    let modulus = exp.ram.modulus() as usize;
    let both = !exp.arch.is_holomorphic();
    let mut terms: Vec<(i64, Complex64)> = Vec::new();
    let push_range = |lo: u64, hi: u64, terms: &mut Vec<(i64, Complex64)>| -> Result<f64> {
        let mut mass = 0.0;
        for m in lo as i64 + 1..=hi as i64 {
            for s in [m, -m] {
                if (s > 0 || both) && exp.ram.in_support(s) {
                    let a = exp.amplitude(s, y, table)?;
                    mass += a.norm();
                    terms.push((s, a));
                }
            }
        }
        Ok(mass)
    };
    let mut r = exp.initial_cutoff(y);
    push_range(0, r, &mut terms)?;
    let mut doublings = 0;
    loop {
        let tail = push_range(r, 2 * r, &mut terms)?;
        r *= 2;
        let (sup, arg, points) = row_max(&terms, x_steps, r, both);
        if tail <= exp.cfg.rel_tol * sup || (tail == 0.0 && sup == 0.0) {
            let (witness_m, witness) = terms
                .iter()
                .map(|(m, a)| (*m, a.norm()))
                .fold((0i64, 0.0f64), |b, t| if t.1 > b.1 { t } else { b });
            return Ok(RowSample {
                class,
                y,
                cutoff: r,
                x_points: points,
                sup,
                argmax_x: arg as f64 * modulus as f64 / points as f64,
                witness,
                witness_m,
            });
        }
        doublings += 1;
        if doublings >= exp.cfg.max_doublings {
            return Err(Error::Unstable(format!("scan row y = {y}: tail did not settle by cutoff {r}")));
        }
    }
}

/// Max of `|sum_m a_m e(m x / N^2)|` over `x = j N^2 / L`, with `L` the
/// first `x_steps 2^s` exceeding the span of the frequencies so that every
/// single term is a Fourier coefficient of the sampled row.
fn row_max(terms: &[(i64, Complex64)], x_steps: usize, r: u64, both: bool) -> (f64, usize, usize) {
    let span = if both { 2 * r as usize + 1 } else { r as usize + 1 };
    let mut points = x_steps;
    while points < span {
        points *= 2;
    }
    // frequency of e(m x / N^2) at x_j = j N^2 / L is m j / L
    let mut bins = vec![Complex64::new(0.0, 0.0); points];
    for &(m, a) in terms {
        bins[m.rem_euclid(points as i64) as usize] += a;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(points).process(&mut bins);
    let mut best = (0.0f64, 0usize);
    for (j, v) in bins.iter().enumerate() {
        let n = v.norm();
        if n > best.0 {
            best = (n, j);
        }
    }
    (best.0, best.1, points)
}

/// Least-squares slope of `log v` against `log c`.
pub fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global::expansion::evaluate_phi;
    use crate::global::ramified::unit_classes;

    fn small_grid(level: u64, arch: &ArchParams) -> GridSpec {
        let mut g = GridSpec::standard(level, arch);
        g.rows_per_decade = 16;
        g
    }

    #[test]
    fn rows_span_the_range() {
        let g = GridSpec::standard(3, &ArchParams::Holomorphic { k: 12 });
        let r = g.rows();
        assert_eq!(r[0], Y_FLOOR);
        assert!((r.last().unwrap() - g.y_max).abs() < 1e-9 * g.y_max);
        assert_eq!(g.x_steps, 576);
    }

    #[test]
    fn fft_rows_match_direct_evaluation() {
        let arch = ArchParams::Holomorphic { k: 12 };
        let ram = RamifiedData::standard(&[(3, 1, 2)]).unwrap();
        let src = CoefficientSource::sato_tate(9, 0.0).with_ramified(&[3]);
        let mut grid = small_grid(3, &arch);
        grid.y_max = 2.0;
        let rep = scan_supnorm(&grid, &[ram.clone()], &src, &arch, &Default::default()).unwrap();
        let row = &rep.rows[3];
        let direct = evaluate_phi(row.argmax_x, row.y, &ram, &src, &arch, &Default::default()).unwrap();
        assert!((direct.value.norm() - row.sup).abs() <= 1e-9 * row.sup);
    }

    #[test]
    fn level_one_peak_near_kernel_peak() {
        let k = 12;
        let arch = ArchParams::Holomorphic { k };
        let ram = RamifiedData::unramified();
        let rep = scan_supnorm(
            &small_grid(1, &arch),
            &[ram],
            &CoefficientSource::all_ones(0.0),
            &arch,
            &Default::default(),
        )
        .unwrap();
        let y0 = k as f64 / (4.0 * std::f64::consts::PI);
        assert!(rep.argmax.y > 0.5 * y0 && rep.argmax.y < 2.0 * y0, "{}", rep.argmax.y);
        assert!(rep.sup >= rep.witness.value);
        assert_eq!(rep.witness.m, 1);
    }

    #[test]
    fn sup_dominates_witness_on_every_row() {
        let arch = ArchParams::Holomorphic { k: 20 };
        let classes: Vec<_> = unit_classes(5, 1)
            .into_iter()
            .map(|z| RamifiedData::standard(&[(5, 1, z)]).unwrap())
            .collect();
        let src = CoefficientSource::sato_tate(3, 0.0).with_ramified(&[5]);
        let rep = scan_supnorm(&small_grid(5, &arch), &classes, &src, &arch, &Default::default()).unwrap();
        assert!(rep.rows.iter().all(|r| r.sup >= r.witness * (1.0 - 1e-12)));
        assert_eq!(rep.classes.len(), 4);
    }

    #[test]
    fn deterministic() {
        let arch = ArchParams::Holomorphic { k: 12 };
        let ram = RamifiedData::standard(&[(3, 1, 1)]).unwrap();
        let src = CoefficientSource::sato_tate(1, 0.0).with_ramified(&[3]);
        let a = scan_supnorm(&small_grid(3, &arch), &[ram.clone()], &src, &arch, &Default::default()).unwrap();
        let b = scan_supnorm(&small_grid(3, &arch), &[ram], &src, &arch, &Default::default()).unwrap();
        assert_eq!(a.rows_csv(), b.rows_csv());
        assert_eq!(a.sup, b.sup);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 81.0, 625.0].iter().map(|&c: &f64| (c, 3.0 * c.powf(0.125))).collect();
        assert!((log_slope(&pts) - 0.125).abs() < 1e-12);
    }
}
