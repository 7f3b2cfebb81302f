//! Weighted least-squares power dispatch.
//!
//! Each time slot is an independent problem: grant `x_i` in `[0, p_i]` to
//! load `i` minimizing `sum_i 0.5 * w_i * (p_i - x_i)^2` with `sum_i x_i` at
//! most the grid power `g`. The optimum is `x_i = clamp(p_i - lambda / w_i)`
//! for the cap multiplier `lambda`, found by bisection and then fixed in
//! closed form on the active set.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

pub const ORACLE_MAX_LOADS: usize = 4;
const BISECT_STEPS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DispatchError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("oracle handles at most {limit} loads, got {loads}")]
    InstanceTooLarge { loads: usize, limit: usize },
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchProblem {
    pub weights: Vec<f64>,
    /// `p_req[i][j]`: power requested by load `i` in slot `j` (kW).
    pub p_req: Vec<Vec<f64>>,
    pub p_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotSolution {
    pub x: Vec<f64>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    /// `x[i][j]`, same shape as the requests.
    pub x: Vec<Vec<f64>>,
    pub lambda: Vec<f64>,
}

impl DispatchProblem {
    pub fn loads(&self) -> usize {
        self.weights.len()
    }

    pub fn slots(&self) -> usize {
        self.p_grid.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.p_req.iter().map(|row| row[j]).collect()
    }

    pub fn validate(&self) -> Result<(), DispatchError> {
        let (n, k) = (self.loads(), self.slots());
        if n == 0 || k == 0 {
            return Err(DispatchError::BadInput("need at least one load and one slot".into()));
        }
        if self.p_req.len() != n || self.p_req.iter().any(|r| r.len() != k) {
            return Err(DispatchError::BadInput(format!("requests must be {n} rows of {k} values")));
        }
        check_slot(&self.weights, &self.p_req.iter().flatten().copied().collect::<Vec<_>>(), 0.0)?;
        if let Some(g) = self.p_grid.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(DispatchError::BadInput(format!("grid power must be non-negative, got {g}")));
        }
        Ok(())
    }
}

impl DispatchSolution {
    pub fn objective(&self, problem: &DispatchProblem) -> f64 {
        (0..problem.slots())
            .map(|j| {
                let x: Vec<f64> = self.x.iter().map(|r| r[j]).collect();
                slot_objective(&problem.weights, &problem.column(j), &x)
            })
            .sum()
    }
}

fn check_slot(w: &[f64], p: &[f64], g: f64) -> Result<(), DispatchError> {
    if let Some(v) = w.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(DispatchError::BadInput(format!("weights must be positive, got {v}")));
    }
    if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(DispatchError::BadInput(format!("requests must be non-negative, got {v}")));
    }
    if !g.is_finite() || g < 0.0 {
        return Err(DispatchError::BadInput(format!("grid power must be non-negative, got {g}")));
    }
    Ok(())
}

pub fn slot_objective(w: &[f64], p: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(p).zip(x).map(|((w, p), x)| 0.5 * w * (p - x) * (p - x)).sum()
}

fn grants(w: &[f64], p: &[f64], lambda: f64) -> Vec<f64> {
    w.iter().zip(p).map(|(w, p)| (p - lambda / w).clamp(0.0, *p)).collect()
}

pub fn cap_tolerance(g: f64) -> f64 {
    1e-9 * g.max(1.0)
}

pub fn solve_slot(w: &[f64], p: &[f64], g: f64) -> Result<SlotSolution, DispatchError> {
    if w.len() != p.len() || w.is_empty() {
        return Err(DispatchError::BadInput("weights and requests differ in length".into()));
    }
    check_slot(w, p, g)?;
    let demand: f64 = p.iter().sum();
    if demand <= g {
        return Ok(SlotSolution { x: p.to_vec(), lambda: 0.0 });
    }

    let (mut lo, mut hi) = (0.0, w.iter().zip(p).map(|(w, p)| w * p).fold(0.0, f64::max));
    for _ in 0..BISECT_STEPS {
        let mid = 0.5 * (lo + hi);
        let total: f64 = grants(w, p, mid).iter().sum();
        if (total - g).abs() <= cap_tolerance(g) * 1e-3 || hi - lo <= f64::EPSILON * hi {
            lo = mid;
            hi = mid;
            break;
        }
        if total > g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = 0.5 * (lo + hi);

    // Exact multiplier for the loads strictly inside their boxes.
    let free: Vec<usize> = (0..w.len()).filter(|&i| lambda < w[i] * p[i]).collect();
    if !free.is_empty() {
        let num: f64 = free.iter().map(|&i| p[i]).sum::<f64>() - g;
        let den: f64 = free.iter().map(|&i| 1.0 / w[i]).sum();
        let exact = num / den;
        let same_set = (0..w.len()).all(|i| (exact < w[i] * p[i]) == free.contains(&i));
        if exact >= 0.0 && same_set {
            let total: f64 = grants(w, p, exact).iter().sum();
            if (total - g).abs() <= cap_tolerance(g) {
                lambda = exact;
            }
        }
    }
    Ok(SlotSolution { x: grants(w, p, lambda), lambda })
}

pub fn solve_horizon(problem: &DispatchProblem) -> Result<DispatchSolution, DispatchError> {
    problem.validate()?;
    let mut x = vec![Vec::with_capacity(problem.slots()); problem.loads()];
    let mut lambda = Vec::with_capacity(problem.slots());
    for j in 0..problem.slots() {
        let slot = solve_slot(&problem.weights, &problem.column(j), problem.p_grid[j])?;
        for (row, xi) in x.iter_mut().zip(slot.x) {
            row.push(xi);
        }
        lambda.push(slot.lambda);
    }
    Ok(DispatchSolution { x, lambda })
}

/// Largest violation of the optimality conditions: box and cap feasibility,
/// stationarity on free coordinates, sign conditions at the bounds and
/// complementary slackness of the cap.
pub fn kkt_residual(w: &[f64], p: &[f64], g: f64, x: &[f64], lambda: f64) -> f64 {
    let mut r: f64 = (-lambda).max(0.0);
    let total: f64 = x.iter().sum();
    r = r.max(total - g);
    r = r.max(lambda * (g - total).max(0.0));
    let tol = 1e-12;
    for i in 0..w.len() {
        r = r.max(-x[i]).max(x[i] - p[i]);
        let grad = w[i] * (p[i] - x[i]);
        r = r.max(if x[i] <= tol {
            (grad - lambda).max(0.0)
        } else if x[i] >= p[i] - tol {
            (lambda - grad).max(0.0)
        } else {
            (grad - lambda).abs()
        });
    }
    r
}

/// Reference minimizer by enumeration of faces of the feasible polytope: every
/// split of the loads into zero, full and free, with the cap either slack or
/// tight; the cheapest feasible candidate wins.
pub fn dispatch_oracle(w: &[f64], p: &[f64], g: f64) -> Result<Vec<f64>, DispatchError> {
    let n = w.len();
    if n > ORACLE_MAX_LOADS {
        return Err(DispatchError::InstanceTooLarge { loads: n, limit: ORACLE_MAX_LOADS });
    }
    if p.len() != n || n == 0 {
        return Err(DispatchError::BadInput("weights and requests differ in length".into()));
    }
    check_slot(w, p, g)?;

    let feasible = |x: &[f64]| {
        x.iter().zip(p).all(|(x, p)| *x >= -1e-12 && *x <= p + 1e-12) && x.iter().sum::<f64>() <= g + cap_tolerance(g)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if feasible(&x) {
            let f = slot_objective(w, p, &x);
            if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, x));
            }
        }
    };

    for code in 0..3usize.pow(n as u32) {
        // face[i]: 0 = zero, 1 = full request, 2 = free
        let face: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let mut x: Vec<f64> = (0..n).map(|i| if face[i] == 1 { p[i] } else { 0.0 }).collect();
        let free: Vec<usize> = (0..n).filter(|&i| face[i] == 2).collect();
        if free.is_empty() {
            consider(x);
            continue;
        }
        // Cap slack: free loads sit at their own minimizer.
        let mut slack = x.clone();
        free.iter().for_each(|&i| slack[i] = p[i]);
        consider(slack);
        // Cap tight: minimize over the free loads with their sum pinned.
        let fixed: f64 = x.iter().sum();
        let budget = g - fixed;
        let inv: f64 = free.iter().map(|&i| 1.0 / w[i]).sum();
        let shortfall = free.iter().map(|&i| p[i]).sum::<f64>() - budget;
        let mu = shortfall / inv;
        free.iter().for_each(|&i| x[i] = p[i] - mu / w[i]);
        consider(x);
    }
    Ok(best.map(|(_, x)| x).expect("the zero grant is always feasible"))
}

impl FromStr for DispatchProblem {
    type Err = DispatchError;

    /// `N K`, then N weights, N rows of K requests and one row of K grid
    /// powers. Blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("")))
            .filter(|(_, l)| !l.trim().is_empty());
        let mut last_line = 0;
        let mut row = |what: &str, want: usize| -> Result<Vec<f64>, DispatchError> {
            let Some((line, body)) = lines.next() else {
                return Err(DispatchError::Parse { line: last_line + 1, col: 1, message: format!("missing {what}") });
            };
            last_line = line;
            let values = numbers(line, body)?;
            if values.len() != want {
                return Err(DispatchError::Parse {
                    line,
                    col: 1,
                    message: format!("{what}: expected {want} values, found {}", values.len()),
                });
            }
            Ok(values)
        };

        let header = row("header `N K`", 2)?;
        let count = |v: f64, what: &str| -> Result<usize, DispatchError> {
            if v.fract() == 0.0 && (1.0..=1e6).contains(&v) {
                Ok(v as usize)
            } else {
                Err(DispatchError::Parse { line: 1, col: 1, message: format!("{what} must be a positive integer") })
            }
        };
        let (n, k) = (count(header[0], "N")?, count(header[1], "K")?);
        let weights = row("weights", n)?;
        let p_req = (0..n).map(|i| row(&format!("requests of load {}", i + 1), k)).collect::<Result<_, _>>()?;
        let p_grid = row("grid powers", k)?;
        let problem = DispatchProblem { weights, p_req, p_grid };
        problem.validate()?;
        Ok(problem)
    }
}

fn numbers(line: usize, body: &str) -> Result<Vec<f64>, DispatchError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in body.split_whitespace() {
        let col = body[offset..].find(tok).map_or(0, |p| p + offset) + 1;
        offset = col - 1 + tok.len();
        let v: f64 =
            tok.parse().map_err(|_| DispatchError::Parse { line, col, message: format!("`{tok}` is not a number") })?;
        out.push(v);
    }
    Ok(out)
}

/// N rows of K grants then a `lambda` row, six decimals.
pub fn format_solution(sol: &DispatchSolution) -> String {
    let mut out = String::new();
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ");
    for row in &sol.x {
        let _ = writeln!(out, "{}", join(row));
    }
    let _ = writeln!(out, "lambda {}", join(&sol.lambda));
    out
}
