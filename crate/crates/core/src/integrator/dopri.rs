//! Dormand-Prince 5(4) with PI step control and the 4th-order continuous
//! extension (Hairer, Norsett & Wanner, "Solving ODEs I", II.6).


const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub(crate) const SAFETY: f64 = 0.9;
pub(crate) const MIN_FACTOR: f64 = 0.2;
pub(crate) const MAX_FACTOR: f64 = 5.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

/// Right-hand side of an autonomous system on the solver's coordinates.
pub(crate) trait Rhs {
    fn eval(&mut self, y: &[f64], dy: &mut [f64]);
    /// Index of a coordinate that crossed the divergence bound, if any.
    fn diverged(&self, y: &[f64]) -> Option<usize>;
}

pub(crate) struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    pub h0: f64,
    pub max_step: f64,
    pub max_steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Counters {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
    pub last_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Completed,
    Diverged { time: f64, index: usize },
    StepFailure { time: f64, step: f64 },
}

/// Uniform output grid `0, dt, 2 dt, ...` closed with `t_end`.
pub(crate) fn sample_grid(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let last = *grid.last().unwrap();
    if t_end - last > 1e-9 * dt.max(1.0) {
        grid.push(t_end);
    } else if let Some(l) = grid.last_mut() {
        *l = l.min(t_end);
    }
    grid
}

/// Integrates from `t = 0` and calls `emit(t, y)` at every grid time reached.
pub(crate) fn solve<R: Rhs>(
    rhs: &mut R,
    y0: &[f64],
    s: &Settings,
    grid: &[f64],
    mut emit: impl FnMut(f64, &[f64]),
) -> (Outcome, Counters) {
    let n = y0.len();
    let mut c = Counters::default();
    let mut next = 0;
    while next < grid.len() && grid[next] <= 0.0 {
        emit(grid[next], y0);
        next += 1;
    }
    if n == 0 || s.t_end <= 0.0 {
        for &t in &grid[next..] {
            emit(t, y0);
        }
        return (Outcome::Completed, c);
    }

    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];
    let mut dense = vec![vec![0.0; n]; 5];
    let mut out = vec![0.0; n];

    rhs.eval(&y, &mut k[0]);
    c.evaluations += 1;
    let mut t = 0.0;
    let mut h = s.h0.min(s.max_step).min(s.t_end);
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;

    while t < s.t_end {
        if c.accepted + c.rejected >= s.max_steps {
            return (Outcome::StepFailure { time: t, step: h }, c);
        }
        let last = t + h >= s.t_end * (1.0 - 1e-15);
        if last {
            h = s.t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return (Outcome::StepFailure { time: t, step: h }, c);
        }

        macro_rules! stage {
            ($dst:expr, $($coef:expr => $ki:expr),+) => {{
                for i in 0..n {
                    tmp[i] = y[i] + h * (0.0 $(+ $coef * k[$ki][i])+);
                }
                rhs.eval(&tmp, &mut k[$dst]);
            }};
        }
        stage!(1, A21 => 0);
        stage!(2, A31 => 0, A32 => 1);
        stage!(3, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            y_new[i] = y[i]
                + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        rhs.eval(&y_new, &mut k[6]);
        c.evaluations += 6;

        let mut acc = 0.0;
        for i in 0..n {
            err_vec[i] = h
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = s.atol + s.rtol * y[i].abs().max(y_new[i].abs());
            acc += (err_vec[i] / sc).powi(2);
        }
        let err = (acc / n as f64).sqrt();

        if !err.is_finite() || err > 1.0 {
            c.rejected += 1;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).max(MIN_FACTOR)
            } else {
                MIN_FACTOR
            };
            h *= fac;
            last_rejected = true;
            continue;
        }

        c.accepted += 1;
        let t_new = if last { s.t_end } else { t + h };

        // continuous extension on [t, t_new]
        for i in 0..n {
            let ydiff = y_new[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            dense[0][i] = y[i];
            dense[1][i] = ydiff;
            dense[2][i] = bspl;
            dense[3][i] = ydiff - h * k[6][i] - bspl;
            dense[4][i] = h
                * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
        }
        while next < grid.len() && grid[next] <= t_new {
            let ts = grid[next];
            if ts == t_new {
                emit(ts, &y_new);
            } else {
                let th = (ts - t) / h;
                let th1 = 1.0 - th;
                for i in 0..n {
                    out[i] = dense[0][i]
                        + th * (dense[1][i]
                            + th1 * (dense[2][i] + th * (dense[3][i] + th1 * dense[4][i])));
                }
                emit(ts, &out);
            }
            next += 1;
        }

        std::mem::swap(&mut y, &mut y_new);
        k.swap(0, 6);
        t = t_new;
        c.last_step = h;

        if let Some(index) = rhs.diverged(&y) {
            return (Outcome::Diverged { time: t, index }, c);
        }

        let mut fac = SAFETY * err.max(1e-16).powf(-EXPO) * err_old.powf(BETA);
        fac = fac.clamp(MIN_FACTOR, MAX_FACTOR);
        if last_rejected {
            fac = fac.min(1.0);
        }
        err_old = err.max(1e-4);
        last_rejected = false;
        h = (h * fac).min(s.max_step);
    }
    (Outcome::Completed, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay(f64);
    impl Rhs for Decay {
        fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
            for (d, v) in dy.iter_mut().zip(y) {
                *d = -self.0 * v;
            }
        }
        fn diverged(&self, _: &[f64]) -> Option<usize> {
            None
        }
    }

    struct Oscillator;
    impl Rhs for Oscillator {
        fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
        fn diverged(&self, _: &[f64]) -> Option<usize> {
            None
        }
    }

    fn settings(t_end: f64, tol: f64) -> Settings {
        Settings { rtol: tol, atol: tol, t_end, h0: 1e-4, max_step: f64::INFINITY, max_steps: 10_000_000 }
    }

    #[test]
    fn grid_shape() {
        assert_eq!(sample_grid(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sample_grid(0.0, 0.1), vec![0.0]);
        assert_eq!(sample_grid(2000.0, 0.1).len(), 20001);
        assert_eq!(*sample_grid(1.05, 0.5).last().unwrap(), 1.05);
    }

    #[test]
    fn exponential_decay_accuracy() {
        let grid = sample_grid(5.0, 0.1);
        let mut worst: f64 = 0.0;
        let (o, c) = solve(&mut Decay(1.3), &[2.0], &settings(5.0, 1e-10), &grid, |t, y| {
            worst = worst.max((y[0] - 2.0 * (-1.3 * t).exp()).abs());
        });
        assert_eq!(o, Outcome::Completed);
        assert!(c.accepted > 0);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn dense_output_is_fourth_order_accurate() {
        // samples strictly inside steps exercise the interpolant
        let grid = sample_grid(20.0, 0.037);
        let mut worst: f64 = 0.0;
        solve(&mut Oscillator, &[1.0, 0.0], &settings(20.0, 1e-11), &grid, |t, y| {
            worst = worst.max((y[0] - t.cos()).abs()).max((y[1] + t.sin()).abs());
        });
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn error_scales_with_tolerance() {
        let run = |tol: f64| {
            let mut last = 0.0;
            solve(&mut Oscillator, &[1.0, 0.0], &settings(10.0, tol), &[0.0, 10.0], |_, y| last = y[0]);
            (last - 10f64.cos()).abs()
        };
        assert!(run(1e-10) < run(1e-6));
    }
}
