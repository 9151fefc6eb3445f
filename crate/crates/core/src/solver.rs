//! Time loop around [`fct_advance`].

use crate::error::{Error, Result};
use crate::fct::{fct_advance, EtaStats, LimiterMode, LimiterOptions};
use crate::grid::CellField;
use crate::problems::{
    exact_solution, initial_condition, max_norm_error, observed_orders, ErrorReport, ProblemSpec,
};
use crate::schemes::{scheme_coefficients, ProductOrder, SchemeName, StencilScheme};
use crate::velocity::{face_average_velocity, FaceVelocity, VelocityField};

/// Per-step record passed to observers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub eta: Option<EtaStats>,
}

#[derive(Clone, Debug)]
pub struct Solver {
    q: CellField,
    u_face: FaceVelocity,
    scheme: StencilScheme,
    order: ProductOrder,
    mode: LimiterMode,
    options: LimiterOptions,
    dt: f64,
    time: f64,
    steps: usize,
}

impl Solver {
    /// `dt = sigma h / max |u^d|` over the face velocities.
    pub fn new(
        q0: CellField,
        velocity: &VelocityField,
        scheme: StencilScheme,
        order: ProductOrder,
        sigma: f64,
        mode: LimiterMode,
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::config("sigma", "sigma must be positive"));
        }
        let grid = *q0.grid();
        let u_face = face_average_velocity(velocity, &grid);
        let dt = sigma * grid.h() / u_face.max_speed()?;
        let mut q = q0;
        q.fill_ghosts();
        Ok(Self {
            q,
            u_face,
            scheme,
            order,
            mode,
            options: LimiterOptions::default(),
            dt,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn with_options(mut self, options: LimiterOptions) -> Self {
        self.options = options;
        self
    }

    pub fn state(&self) -> &CellField {
        &self.q
    }

    pub fn into_state(self) -> CellField {
        self.q
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn face_velocity(&self) -> &FaceVelocity {
        &self.u_face
    }

    /// Advances by `dt`, rejecting non-finite results.
    pub fn step_by(&mut self, dt: f64) -> Result<StepInfo> {
        let out = fct_advance(
            &self.q,
            &self.u_face,
            dt,
            &self.scheme,
            self.order,
            self.mode,
            self.options,
        );
        self.steps += 1;
        if let Some(k) = out.q_next.first_non_finite() {
            let c = out.q_next.grid().coords(k);
            let cell = if out.q_next.grid().dim() == 1 {
                format!("{}", c[0])
            } else {
                format!("({}, {})", c[0], c[1])
            };
            return Err(Error::NonFinite {
                step: self.steps,
                cell,
            });
        }
        self.q = out.q_next;
        self.time += dt;
        Ok(StepInfo {
            step: self.steps,
            time: self.time,
            dt,
            eta: out.state.map(|s| EtaStats::of(&s.eta)),
        })
    }

    /// Steps until `t_final`, shortening the last step to land on it.
    /// Remainders below `1e-12 t_final` are treated as roundoff.
    pub fn advance_to(
        &mut self,
        t_final: f64,
        mut observe: impl FnMut(&StepInfo, &CellField),
    ) -> Result<()> {
        let slack = 1e-12 * t_final.abs().max(self.dt);
        while t_final - self.time > slack {
            let remaining = t_final - self.time;
            let dt = if remaining - self.dt <= slack {
                remaining
            } else {
                self.dt
            };
            let info = self.step_by(dt)?;
            observe(&info, &self.q);
        }
        self.time = self.time.max(t_final);
        Ok(())
    }
}

/// Scheme, CFL number and limiter settings for a problem run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub scheme: StencilScheme,
    pub order: ProductOrder,
    pub sigma: f64,
    pub mode: LimiterMode,
    pub options: LimiterOptions,
}

impl RunSettings {
    /// The scheme's default product-rule order and limiter options.
    pub fn new(name: SchemeName, sigma: f64, mode: LimiterMode) -> Self {
        let scheme = scheme_coefficients(name);
        Self {
            scheme,
            order: scheme.default_product_order(),
            sigma,
            mode,
            options: LimiterOptions::default(),
        }
    }
}

/// Initial and final states of a finished run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub initial: CellField,
    pub solution: CellField,
    pub steps: usize,
    pub time: f64,
    pub dt: f64,
}

impl RunOutcome {
    /// `|sum q - sum q0| / |sum q0|`, or the absolute change if `sum q0 = 0`.
    pub fn conservation_drift(&self) -> f64 {
        relative_drift(self.initial.conserved_sum(), self.solution.conserved_sum())
    }
}

pub fn relative_drift(before: f64, after: f64) -> f64 {
    let diff = (after - before).abs();
    if before == 0.0 {
        diff
    } else {
        diff / before.abs()
    }
}

/// Runs `spec` on an `n`-cell grid to `t_final`.
pub fn solve_problem(
    spec: &ProblemSpec,
    n: usize,
    settings: &RunSettings,
    t_final: f64,
    observe: impl FnMut(&StepInfo, &CellField),
) -> Result<RunOutcome> {
    let grid = spec.grid(n)?;
    let initial = initial_condition(spec, &grid)?;
    let velocity = spec.velocity_field(&grid)?;
    let mut solver = Solver::new(
        initial.clone(),
        &velocity,
        settings.scheme,
        settings.order,
        settings.sigma,
        settings.mode,
    )?
    .with_options(settings.options);
    solver.advance_to(t_final, observe)?;
    Ok(RunOutcome {
        initial,
        steps: solver.steps(),
        time: solver.time(),
        dt: solver.dt(),
        solution: solver.into_state(),
    })
}

/// Max-norm errors against the exact solution at `t_final` for each `N`, with
/// observed orders between successive entries.
pub fn convergence_study(
    spec: &ProblemSpec,
    settings: &RunSettings,
    ns: &[usize],
    t_final: f64,
) -> Result<Vec<ErrorReport>> {
    let mut results = Vec::with_capacity(ns.len());
    for &n in ns {
        let out = solve_problem(spec, n, settings, t_final, |_, _| {})?;
        let exact = exact_solution(spec, out.solution.grid(), t_final)?;
        results.push((n, max_norm_error(&out.solution, &exact)?));
    }
    Ok(observed_orders(&results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::schemes::{scheme_coefficients, SchemeName};
    use crate::velocity::VelocityKind;

    fn solver(n: usize, sigma: f64, v: &VelocityField, dim: usize) -> Solver {
        let g = Grid::unit(dim, n).unwrap();
        let q = CellField::from_fn(g, |c| ((c[0] + c[1]) % 3) as f64);
        let s = scheme_coefficients(SchemeName::U5);
        Solver::new(q, v, s, ProductOrder::Fourth, sigma, LimiterMode::On).unwrap()
    }

    #[test]
    fn exact_step_count_for_constant_velocity() {
        let mut s = solver(32, 0.8, &VelocityField::constant_diagonal(), 1);
        let mut dts = Vec::new();
        s.advance_to(1.0, |i, _| dts.push(i.dt)).unwrap();
        assert_eq!(s.steps(), 40);
        assert!(dts.iter().all(|&d| (d - 0.025).abs() < 1e-15));
        assert_eq!(s.time(), 1.0);
    }

    #[test]
    fn last_step_is_shortened() {
        let g = Grid::unit(2, 16).unwrap();
        let v = VelocityField::for_grid(VelocityKind::SolidBodyRotation, &g).unwrap();
        let mut s = solver(16, 0.8, &v, 2);
        let dt = s.dt();
        let mut last = 0.0;
        s.advance_to(0.3, |i, _| last = i.dt).unwrap();
        assert_eq!(s.steps(), (0.3 / dt).ceil() as usize);
        assert!(last <= dt && last > 0.0);
        assert!((s.time() - 0.3).abs() < 1e-14);
    }

    #[test]
    fn zero_final_time_takes_no_steps() {
        let mut s = solver(16, 0.8, &VelocityField::constant_diagonal(), 1);
        let q0 = s.state().clone();
        s.advance_to(0.0, |_, _| panic!("no steps expected"))
            .unwrap();
        assert_eq!(s.state(), &q0);
    }

    #[test]
    fn rejects_bad_sigma() {
        let g = Grid::unit(1, 16).unwrap();
        let q = CellField::zeros(g);
        let s = scheme_coefficients(SchemeName::C4);
        let v = VelocityField::constant_diagonal();
        for sigma in [0.0, -1.0, f64::NAN] {
            assert!(Solver::new(
                q.clone(),
                &v,
                s,
                ProductOrder::Fourth,
                sigma,
                LimiterMode::On
            )
            .is_err());
        }
    }

    #[test]
    fn blow_up_is_reported() {
        // far beyond the stability limit, unlimited
        let g = Grid::unit(1, 16).unwrap();
        let q = CellField::from_fn(g, |c| f64::from(c[0] == 3));
        let s = scheme_coefficients(SchemeName::C4);
        let mut sol = Solver::new(
            q,
            &VelocityField::constant_diagonal(),
            s,
            ProductOrder::Fourth,
            40.0,
            LimiterMode::Off,
        )
        .unwrap();
        let err = sol.advance_to(1e6, |_, _| {}).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn drift_is_relative() {
        assert_eq!(relative_drift(2.0, 2.5), 0.25);
        assert_eq!(relative_drift(0.0, 1e-3), 1e-3);
    }

    #[test]
    fn solve_problem_matches_manual_loop() {
        use crate::problems::IcKind;
        let spec = ProblemSpec::new(IcKind::Square, VelocityKind::ConstantDiagonal, 1).unwrap();
        let settings = RunSettings::new(SchemeName::U5, 0.8, LimiterMode::On);
        let mut count = 0;
        let out = solve_problem(&spec, 32, &settings, 0.5, |_, _| count += 1).unwrap();
        assert_eq!(out.steps, 20);
        assert_eq!(count, 20);

        let g = spec.grid(32).unwrap();
        let q0 = initial_condition(&spec, &g).unwrap();
        let mut s = Solver::new(
            q0,
            &VelocityField::constant_diagonal(),
            settings.scheme,
            settings.order,
            0.8,
            LimiterMode::On,
        )
        .unwrap();
        s.advance_to(0.5, |_, _| {}).unwrap();
        assert_eq!(s.state(), &out.solution);
        assert!(out.conservation_drift() < 1e-14);
    }

    #[test]
    fn square_orders_stay_low() {
        use crate::problems::IcKind;
        let spec = ProblemSpec::new(IcKind::Square, VelocityKind::ConstantDiagonal, 1).unwrap();
        let settings = RunSettings::new(SchemeName::U5, 0.8, LimiterMode::On);
        let report = convergence_study(&spec, &settings, &[32, 64, 128], 1.0).unwrap();
        assert_eq!(report.len(), 3);
        assert!(report[0].order.is_none());
        for r in &report[1..] {
            assert!(r.order.unwrap() < 1.5, "{r:?}");
        }
    }
}
