//! Period and index of a class `α ∈ H³(X; Z)`: the lift `ξ` with `β_n(ξ) = α`,
//! the obstruction `Q̃(ξ) ∈ H⁵(X; Z) / (α ⌣ H²(X; Z))` and `index = per · ord Q̃`.

use serde::Serialize;

use crate::cochain_ops::{bockstein_cochain, cup, q_cochain, OperationContext};
use crate::cohomology::{subgroup_quotient, Cochain, CohomologyClass, Quotient};
use crate::complexes::normalized_boundary;
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, Int, Order};

/// Default bound on the number of lifts enumerated by [`all_lifts`].
pub const DEFAULT_COSET_CAP: u128 = 4096;

/// `ε(n) = n · gcd(2, n)`.
pub fn epsilon(n: &Int) -> Int {
    n * &n.gcd(&Int::from(2))
}

fn check_alpha(ctx: &OperationContext, alpha: &CohomologyClass) -> Result<()> {
    let g = alpha.group();
    if g.space() != ctx.space_id() || g.degree() != 3 || g.modulus() != 0 {
        return Err(Error::Shape(format!(
            "expected a class in H^3(X; Z) of '{}', got degree {} modulus {}",
            ctx.space().label(),
            g.degree(),
            g.modulus()
        )));
    }
    Ok(())
}

/// `per(α) = ord(α)`.
pub fn period(ctx: &OperationContext, alpha: &CohomologyClass) -> Result<Int> {
    check_alpha(ctx, alpha)?;
    match alpha.order() {
        Order::Finite(k) => Ok(k),
        Order::Infinite => Err(Error::NotTorsion),
    }
}

/// A mod-`n` 2-cocycle `ξ` with `β_n(ξ) = α`, from an integral solution of
/// `δb = n·a` for the canonical representative `a` of `α`.
pub fn lift_to_mod_n(ctx: &OperationContext, alpha: &CohomologyClass, n: u64) -> Result<Cochain> {
    if n < 2 {
        return Err(Error::Modulus(format!("lift modulus must be >= 2, got {n}")));
    }
    let per = period(ctx, alpha)?;
    let ni = Int::from(n);
    if !per.divides(&ni) {
        return Err(Error::NoLift { order: per, n: ni });
    }
    if alpha.is_zero() {
        return Ok(Cochain::zero(ctx.space_id(), 2, n));
    }
    let x = ctx.space();
    let a = alpha.representative()?;
    let rhs = a.scale(&ni).to_dense(x.count(3))?;
    let delta = normalized_boundary(x, 3).transpose();
    let b = solve_linear(&delta, &rhs, &Int::ZERO).map_err(|e| match e {
        Error::NoSolution => Error::Internal(format!("δb = {n}·a has no solution although ord(α) | {n}")),
        e => e,
    })?;
    let xi = Cochain::from_dense(ctx.space_id(), 2, n, &b);
    if ctx.class_of(&bockstein_cochain(ctx, &xi)?)? != *alpha {
        return Err(Error::Internal("β_n of the computed lift differs from α".into()));
    }
    Ok(xi)
}

/// The coset `ξ₀ + ρ_n(H²(X; Z))` of lifts of `α`. Free generators of
/// `H²(X; Z)` take coefficients mod `n`, a generator of order `d` mod `gcd(d, n)`.
#[derive(Clone, Debug)]
pub struct LiftCoset {
    base: Cochain,
    steps: Vec<Cochain>,
    ranges: Vec<u64>,
}

impl LiftCoset {
    pub fn base(&self) -> &Cochain {
        &self.base
    }

    pub fn len(&self) -> u128 {
        self.ranges.iter().map(|&r| r as u128).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Members in lexicographic order of their coefficient vectors.
    pub fn iter(&self) -> impl Iterator<Item = Result<Cochain>> + '_ {
        (0..self.len()).map(move |mut k| {
            let mut z = self.base.clone();
            for (step, &r) in self.steps.iter().zip(&self.ranges) {
                let c = (k % r as u128) as u64;
                k /= r as u128;
                if c != 0 {
                    z = z.add(&step.scale(&Int::from(c)))?;
                }
            }
            Ok(z)
        })
    }
}

pub fn all_lifts(ctx: &OperationContext, alpha: &CohomologyClass, n: u64, cap: u128) -> Result<LiftCoset> {
    let base = lift_to_mod_n(ctx, alpha, n)?;
    let h2 = ctx.group(2, 0)?;
    let p = h2.presentation();
    let ni = Int::from(n);
    let mut steps = Vec::new();
    let mut ranges = Vec::new();
    for (i, g) in h2.generators()?.iter().enumerate() {
        let r = if i < p.free_rank() { ni.clone() } else { p.torsion()[i - p.free_rank()].gcd(&ni) };
        let r = r.to_i64().expect("bounded by n") as u64;
        if r > 1 {
            steps.push(g.reduce(n)?);
            ranges.push(r);
        }
    }
    let coset = LiftCoset { base, steps, ranges };
    let size = coset.len();
    if size > cap {
        return Err(Error::CosetTooLarge { size, cap });
    }
    Ok(coset)
}

/// `H⁵(X; Z) / (α ⌣ H²(X; Z))`.
pub struct AlphaQuotient {
    quotient: Quotient,
    alpha: CohomologyClass,
}

impl AlphaQuotient {
    pub fn new(ctx: &OperationContext, alpha: &CohomologyClass) -> Result<Self> {
        check_alpha(ctx, alpha)?;
        let h5 = ctx.group(5, 0)?;
        let a = alpha.representative()?;
        let spans = ctx
            .group(2, 0)?
            .generators()?
            .iter()
            .map(|g| CohomologyClass::of(h5.clone(), &cup(ctx, &a, g)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlphaQuotient { quotient: subgroup_quotient(&h5, &spans)?, alpha: alpha.clone() })
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    pub fn describe(&self) -> String {
        self.quotient.presentation().describe()
    }

    /// `Q̃(ξ)` for a lift `ξ` of `α`. Its order must divide `ε(n)`.
    pub fn q_tilde(&self, ctx: &OperationContext, xi: &Cochain) -> Result<QTilde> {
        let n = xi.modulus();
        if xi.degree() != 2 || n < 2 {
            return Err(Error::Shape(format!("expected a mod-n 2-cocycle, got degree {} modulus {n}", xi.degree())));
        }
        if ctx.class_of(&bockstein_cochain(ctx, xi)?)? != self.alpha {
            return Err(Error::Shape(format!("β_{n}(ξ) differs from α")));
        }
        let q = ctx.class_of(&q_cochain(ctx, xi)?)?;
        let projected = self.quotient.project(q.coords())?;
        let order = match self.quotient.presentation().element_order(&projected)? {
            Order::Finite(k) => k,
            Order::Infinite => return Err(Error::Internal("Q̃(ξ) has infinite order".into())),
        };
        let eps = epsilon(&Int::from(n));
        if !order.divides(&eps) {
            return Err(Error::Internal(format!("ord Q̃(ξ) = {order} does not divide ε({n}) = {eps}")));
        }
        Ok(QTilde { q, projected, order })
    }
}

/// `Q(ξ)`, its image in the quotient and the order of that image.
#[derive(Clone, Debug)]
pub struct QTilde {
    pub q: CohomologyClass,
    pub projected: Vec<Int>,
    pub order: Int,
}

pub fn q_tilde(ctx: &OperationContext, alpha: &CohomologyClass, xi: &Cochain) -> Result<QTilde> {
    AlphaQuotient::new(ctx, alpha)?.q_tilde(ctx, xi)
}

/// Outcome of the lift-independence audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "status")]
pub enum LiftIndependence {
    NotChecked,
    Holds { lifts: u64 },
    Fails { lifts: u64, first: usize, second: usize },
}

impl LiftIndependence {
    pub fn holds(&self) -> bool {
        matches!(self, LiftIndependence::Holds { .. })
    }
}

/// Lift-independence result with the witnessing lifts on failure.
#[derive(Clone, Debug)]
pub struct LiftAudit {
    pub result: LiftIndependence,
    pub witness: Option<(Cochain, Cochain)>,
    pub orders: Vec<Int>,
}

/// Computes `Q̃` for every lift of `α` and checks that all agree.
pub fn verify_lift_independence(ctx: &OperationContext, alpha: &CohomologyClass, n: u64, cap: u128) -> Result<LiftAudit> {
    let coset = all_lifts(ctx, alpha, n, cap)?;
    let aq = AlphaQuotient::new(ctx, alpha)?;
    let lifts: Vec<Cochain> = coset.iter().collect::<Result<_>>()?;
    let mut first: Option<Vec<Int>> = None;
    let mut orders = Vec::with_capacity(lifts.len());
    for (i, xi) in lifts.iter().enumerate() {
        let qt = aq.q_tilde(ctx, xi)?;
        orders.push(qt.order.clone());
        match &first {
            None => first = Some(qt.projected),
            Some(p) if *p == qt.projected => {}
            Some(_) => {
                return Ok(LiftAudit {
                    result: LiftIndependence::Fails { lifts: lifts.len() as u64, first: 0, second: i },
                    witness: Some((lifts[0].clone(), xi.clone())),
                    orders,
                })
            }
        }
    }
    Ok(LiftAudit { result: LiftIndependence::Holds { lifts: lifts.len() as u64 }, witness: None, orders })
}

/// Result of the period–index pipeline for one class.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PeriodIndexReport {
    pub space: String,
    pub alpha: Vec<Int>,
    pub per: Int,
    #[serde(rename = "ordQ")]
    pub ord_q: Int,
    pub index: Int,
    /// `index = ind_top(α)`; otherwise `index` only divides it.
    pub exact: bool,
    pub epsilon_check: bool,
    pub lift_independence: LiftIndependence,
    #[serde(skip)]
    pub dimension_bound: usize,
    #[serde(skip)]
    pub lift: Option<Cochain>,
    #[serde(skip)]
    pub quotient: String,
    #[serde(skip)]
    pub caveats: Vec<String>,
}

impl PeriodIndexReport {
    /// One JSON object on a single line.
    pub fn record(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let rel = if self.exact { "=" } else { "divides" };
        let mut out = String::new();
        let rows = [
            ("space", self.space.clone()),
            ("alpha", format!("[{}]", self.alpha.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))),
            ("per", self.per.to_string()),
            ("H^5/(alpha.H^2)", self.quotient.clone()),
            ("ordQ", self.ord_q.to_string()),
            ("index", format!("{} ({rel} ind_top)", self.index)),
            ("dimension bound", self.dimension_bound.to_string()),
            ("ordQ | eps(per)", self.epsilon_check.to_string()),
            ("lift independence", self.lift_independence_text()),
        ];
        for (k, v) in rows {
            out.push_str(&format!("{k:<18} {v}\n"));
        }
        for c in &self.caveats {
            out.push_str(&format!("note: {c}\n"));
        }
        out
    }

    fn lift_independence_text(&self) -> String {
        match &self.lift_independence {
            LiftIndependence::NotChecked => "not checked".into(),
            LiftIndependence::Holds { lifts } => format!("holds over {lifts} lifts"),
            LiftIndependence::Fails { first, second, .. } => format!("FAILS (lifts {first} and {second})"),
        }
    }
}

/// `per · ord Q̃(ξ)` for the first lift of `α` mod `per`.
pub fn index_bound(ctx: &OperationContext, alpha: &CohomologyClass) -> Result<PeriodIndexReport> {
    let per = period(ctx, alpha)?;
    let x = ctx.space();
    let dimension_bound = x.nominal_dim();
    let mut caveats = Vec::new();
    if x.dim() < x.nominal_dim() {
        caveats.push(format!("model materialized through dimension {} of {}", x.dim(), x.nominal_dim()));
    }
    caveats.push("dimension bound is the simplicial dimension of the model, not its homotopy dimension".into());
    let mut report = PeriodIndexReport {
        space: x.label().to_string(),
        alpha: alpha.coords().to_vec(),
        per: per.clone(),
        ord_q: Int::ONE,
        index: per.clone(),
        exact: dimension_bound <= 6,
        epsilon_check: true,
        lift_independence: LiftIndependence::NotChecked,
        dimension_bound,
        lift: None,
        quotient: String::new(),
        caveats,
    };
    let aq = AlphaQuotient::new(ctx, alpha)?;
    report.quotient = aq.describe();
    if per.is_one() {
        return Ok(report);
    }
    let n = per.to_i64().filter(|&v| v > 0).ok_or_else(|| Error::Budget(format!("period {per} is too large")))? as u64;
    let xi = lift_to_mod_n(ctx, alpha, n)?;
    let qt = aq.q_tilde(ctx, &xi)?;
    report.epsilon_check = qt.order.divides(&epsilon(&per));
    report.index = &per * &qt.order;
    report.ord_q = qt.order;
    report.lift = Some(xi);
    Ok(report)
}

/// [`index_bound`] followed by the lift-independence audit over lifts mod `n`
/// (default: the period).
pub fn index_bound_audited(
    ctx: &OperationContext,
    alpha: &CohomologyClass,
    n: Option<u64>,
    cap: u128,
) -> Result<PeriodIndexReport> {
    let mut report = index_bound(ctx, alpha)?;
    let n = match n {
        Some(n) => n,
        None if report.per.is_one() => {
            report.lift_independence = LiftIndependence::Holds { lifts: 1 };
            return Ok(report);
        }
        None => report.per.to_i64().expect("checked in index_bound") as u64,
    };
    report.lift_independence = verify_lift_independence(ctx, alpha, n, cap)?.result;
    Ok(report)
}
