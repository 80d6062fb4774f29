//! Zeros of entire functions in a rectangle by the argument principle:
//! boundary winding numbers, recursive quadrisection and Newton polishing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Trapezoid points per box edge before adaptive doubling.
pub const EDGE_POINTS: usize = 512;
const MAX_EDGE_POINTS: usize = 1 << 16;
const MAX_DEPTH: usize = 48;

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) {
            return Err(Error::Precondition(format!("invalid window [{re_min}, {re_max}] x [{im_min}, {im_max}]")));
        }
        Ok(Window { re_min, re_max, im_min, im_max })
    }

    /// `|Re z| <= h`, `|Im z| <= h`.
    pub fn square(h: f64) -> Self {
        Window { re_min: -h, re_max: h, im_min: -h, im_max: h }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> C64 {
        c(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re_min - slack && z.re <= self.re_max + slack && z.im >= self.im_min - slack && z.im <= self.im_max + slack
    }

    /// Scaled copy `{z / s}` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Window { re_min: self.re_min / s, re_max: self.re_max / s, im_min: self.im_min / s, im_max: self.im_max / s }
    }

    fn grow(&self, eps: f64) -> Self {
        Window { re_min: self.re_min - eps, re_max: self.re_max + eps, im_min: self.im_min - eps, im_max: self.im_max + eps }
    }

    fn split(&self, fx: f64, fy: f64) -> [Window; 4] {
        let xm = self.re_min + fx * self.width();
        let ym = self.im_min + fy * self.height();
        [
            Window { re_min: self.re_min, re_max: xm, im_min: self.im_min, im_max: ym },
            Window { re_min: xm, re_max: self.re_max, im_min: self.im_min, im_max: ym },
            Window { re_min: self.re_min, re_max: xm, im_min: ym, im_max: self.im_max },
            Window { re_min: xm, re_max: self.re_max, im_min: ym, im_max: self.im_max },
        ]
    }

    fn boundary_point(&self, s: f64) -> C64 {
        // s in [0, 4): counterclockwise, one unit per edge
        let (w, h) = (self.width(), self.height());
        match s as usize {
            0 => c(self.re_min + s * w, self.im_min),
            1 => c(self.re_max, self.im_min + (s - 1.0) * h),
            2 => c(self.re_max - (s - 2.0) * w, self.im_max),
            _ => c(self.re_min, self.im_max - (s - 3.0) * h),
        }
    }
}

/// A zero with its multiplicity (winding number of its isolating box).
#[derive(Debug, Clone, PartialEq)]
pub struct Zero {
    pub z: C64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone)]
pub struct ZeroSearch {
    pub zeros: Vec<Zero>,
    /// Winding number of the (possibly jittered) outer boundary.
    pub winding: i64,
    /// Largest `|f|` seen on the outer boundary.
    pub boundary_scale: f64,
    pub window: Window,
    pub notes: Vec<String>,
}

enum Winding {
    Count(i64),
    BoundaryZero,
}

fn winding<F: Fn(C64) -> Result<C64> + Sync>(f: &F, b: &Window, scale: f64) -> Result<(Winding, f64)> {
    let mut n = EDGE_POINTS;
    let mut previous: Option<i64> = None;
    while n <= MAX_EDGE_POINTS {
        let total = 4 * n;
        let vals: Vec<C64> = (0..total)
            .into_par_iter()
            .map(|k| f(b.boundary_point(4.0 * k as f64 / total as f64)))
            .collect::<Result<Vec<_>>>()?;
        let fmax = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let fmin = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if !fmax.is_finite() {
            return Err(Error::Overflow("determinant overflow on a box boundary".into()));
        }
        if fmin <= 1e-10 * scale.max(fmax) {
            return Ok((Winding::BoundaryZero, fmax));
        }
        let mut phase = 0.0;
        for k in 0..total {
            phase += (vals[(k + 1) % total] / vals[k]).arg();
        }
        let w = phase / (2.0 * std::f64::consts::PI);
        let r = w.round();
        if (w - r).abs() < 0.01 && previous == Some(r as i64) {
            return Ok((Winding::Count(r as i64), fmax));
        }
        previous = if (w - r).abs() < 0.01 { Some(r as i64) } else { None };
        n *= 2;
    }
    Err(Error::Numerical("winding number did not settle; refine the window".into()))
}

fn derivative<F: Fn(C64) -> Result<C64>>(f: &F, z: C64, h: f64) -> Result<C64> {
    Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
}

/// Newton iteration `z -> z − m f/f'` from `z0`; `None` if it diverges.
fn newton<F: Fn(C64) -> Result<C64>>(f: &F, z0: C64, m: u32, h: f64) -> Result<Option<C64>> {
    let mut z = z0;
    for _ in 0..80 {
        let fz = f(z)?;
        if fz == c(0.0, 0.0) {
            return Ok(Some(z));
        }
        let d = derivative(f, z, h)?;
        if d.norm() == 0.0 || !d.is_finite() {
            return Ok(None);
        }
        let step = fz / d * m as f64;
        z -= step;
        if !z.is_finite() {
            return Ok(None);
        }
        if step.norm() <= 1e-15 * z.norm().max(h) {
            return Ok(Some(z));
        }
    }
    Ok(Some(z))
}

struct Ctx<'a, F> {
    f: &'a F,
    scale: f64,
    cluster: f64,
    h: f64,
}

fn resolve<F: Fn(C64) -> Result<C64> + Sync>(ctx: &Ctx<'_, F>, b: Window, n: i64, depth: usize, notes: &mut Vec<String>) -> Result<Vec<Zero>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let size = b.diameter();
    // try to isolate directly
    if let Some(z) = newton(ctx.f, b.center(), n as u32, ctx.h)? {
        if b.contains(z, 0.0) {
            if n == 1 {
                return Ok(vec![Zero { z, multiplicity: 1 }]);
            }
            let r = ctx.cluster.max(1e-3 * size).min(0.25 * size);
            let tiny = Window { re_min: z.re - r, re_max: z.re + r, im_min: z.im - r, im_max: z.im + r };
            if let Ok((Winding::Count(k), _)) = winding(ctx.f, &tiny, ctx.scale) {
                if k == n {
                    return Ok(vec![Zero { z, multiplicity: n as u32 }]);
                }
            }
        }
    }
    if depth >= MAX_DEPTH || size <= ctx.cluster {
        let z = newton(ctx.f, b.center(), n as u32, ctx.h)?.unwrap_or(b.center());
        notes.push(format!("unresolved cluster of {n} zeros near {:.6e}{:+.6e}i", z.re, z.im));
        return Ok(vec![Zero { z, multiplicity: n as u32 }]);
    }
    // quadrisect; shift the split lines if they pass through a zero
    const OFFSETS: [f64; 6] = [0.5, 0.4671, 0.5329, 0.4137, 0.5863, 0.3571];
    for (attempt, &fr) in OFFSETS.iter().enumerate() {
        let kids = b.split(fr, 1.0 - fr);
        let counts: Vec<(Winding, f64)> = kids.iter().map(|k| winding(ctx.f, k, ctx.scale)).collect::<Result<Vec<_>>>()?;
        if counts.iter().any(|(w, _)| matches!(w, Winding::BoundaryZero)) {
            continue;
        }
        let ns: Vec<i64> = counts.iter().map(|(w, _)| if let Winding::Count(k) = w { *k } else { 0 }).collect();
        if ns.iter().sum::<i64>() != n {
            continue;
        }
        if attempt > 0 {
            notes.push(format!("split lines of a box at depth {depth} jittered (offset {fr})"));
        }
        let mut out = Vec::new();
        for (k, m) in kids.iter().zip(ns) {
            out.extend(resolve(ctx, *k, m, depth + 1, notes)?);
        }
        return Ok(out);
    }
    Err(Error::Numerical("could not split a box away from its zeros".into()))
}

/// All zeros of `f` inside `window` with multiplicities. `grid` sets the
/// initial `grid × grid` partition of the window.
pub fn find_zeros<F>(f: F, window: Window, grid: usize) -> Result<ZeroSearch>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let mut notes = Vec::new();
    let mut win = window;
    let mut outer = None;
    for attempt in 0..8 {
        match winding(&f, &win, 0.0)? {
            (Winding::Count(n), s) => {
                outer = Some((n, s));
                break;
            }
            (Winding::BoundaryZero, _) => {
                let eps = 1e-7 * window.diameter().max(1.0) * (attempt + 1) as f64;
                win = window.grow(eps);
                notes.push(format!("zero on the window boundary; window grown by {eps:.3e}"));
            }
        }
    }
    let (total, scale) = outer.ok_or_else(|| Error::Numerical("window boundary meets a zero after jitter".into()))?;
    let cluster = 1e-9 * win.diameter().max(1.0);
    let ctx = Ctx { f: &f, scale, cluster, h: 1e-6 * win.diameter().max(1.0) };
    let g = grid.max(1);
    let mut cells = Vec::new();
    for j in 0..g {
        for i in 0..g {
            let (w, h) = (win.width() / g as f64, win.height() / g as f64);
            cells.push(Window {
                re_min: win.re_min + i as f64 * w,
                re_max: if i + 1 == g { win.re_max } else { win.re_min + (i + 1) as f64 * w },
                im_min: win.im_min + j as f64 * h,
                im_max: if j + 1 == g { win.im_max } else { win.im_min + (j + 1) as f64 * h },
            });
        }
    }
    let cell_counts: Vec<i64> = if g == 1 {
        vec![total]
    } else {
        let counts = cells.iter().map(|b| winding(&f, b, scale)).collect::<Result<Vec<_>>>()?;
        if counts.iter().any(|(w, _)| matches!(w, Winding::BoundaryZero)) {
            notes.push("grid line meets a zero; falling back to a single cell".into());
            cells = vec![win];
            vec![total]
        } else {
            counts.iter().map(|(w, _)| if let Winding::Count(k) = w { *k } else { 0 }).collect()
        }
    };
    if cell_counts.iter().sum::<i64>() != total {
        return Err(Error::Numerical("cell winding numbers do not add up to the window winding".into()));
    }
    let parts: Vec<(Vec<Zero>, Vec<String>)> = cells
        .par_iter()
        .zip(cell_counts.par_iter())
        .map(|(b, &n)| {
            let mut local = Vec::new();
            resolve(&ctx, *b, n, 0, &mut local).map(|z| (z, local))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut zeros = Vec::new();
    for (z, n) in parts {
        zeros.extend(z);
        notes.extend(n);
    }
    zeros.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(ZeroSearch { zeros, winding: total, boundary_scale: scale, window: win, notes })
}
