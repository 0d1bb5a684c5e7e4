//! Events, Minkowski intervals, and causal membership tests against
//! interaction regions.
//!
//! The metric signature is (−,+,…,+) with c = 1. Interaction regions are
//! over-approximated by a temporal slab times a spatial ball; that only ever
//! enlarges the causal future, which is the conservative direction for
//! update-region decisions.

use crate::profiles::Profile;
use crate::{Error, Result};

pub const MAX_DIM: usize = 3;

/// A spacetime point `(t, x⃗)` with `x⃗` of dimension 1..=3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    x: [f64; MAX_DIM],
    dim: usize,
}

impl Event {
    pub fn new(t: f64, x: &[f64]) -> Event {
        assert!((1..=MAX_DIM).contains(&x.len()), "spatial dimension must be 1..=3");
        assert!(t.is_finite() && x.iter().all(|c| c.is_finite()), "coordinates must be finite");
        let mut buf = [0.0; MAX_DIM];
        buf[..x.len()].copy_from_slice(x);
        Event { t, x: buf, dim: x.len() }
    }

    /// 1+1 dimensional event.
    pub fn d1(t: f64, x: f64) -> Event {
        Event::new(t, &[x])
    }

    /// 3+1 dimensional event.
    pub fn d3(t: f64, x: f64, y: f64, z: f64) -> Event {
        Event::new(t, &[x, y, z])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self) -> &[f64] {
        &self.x[..self.dim]
    }

    pub fn spatial_distance(&self, other: &Event) -> f64 {
        self.x()
            .iter()
            .zip(other.x())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Minkowski interval η(a−b, a−b); negative for timelike separation, zero on
/// the light cone, positive for spacelike separation.
pub fn interval(a: &Event, b: &Event) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "events of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let dt = a.t - b.t;
    let dx2: f64 = a.x().iter().zip(b.x()).map(|(p, q)| (p - q) * (p - q)).sum();
    Ok(dx2 - dt * dt)
}

/// Causal relation of an event to a region, with the light cone boundary
/// reported separately so callers can choose whether null contact counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalRelation {
    Spacelike,
    InFuture,
    InPast,
    BoundaryNullFuture,
    BoundaryNullPast,
}

impl CausalRelation {
    /// Null contact counts as causal, so the causal future includes the
    /// boundary variant.
    pub fn in_causal_future(&self) -> bool {
        matches!(self, CausalRelation::InFuture | CausalRelation::BoundaryNullFuture)
    }

    pub fn in_causal_past(&self) -> bool {
        matches!(self, CausalRelation::InPast | CausalRelation::BoundaryNullPast)
    }

    pub fn is_spacelike(&self) -> bool {
        matches!(self, CausalRelation::Spacelike)
    }

    pub fn label(&self) -> &'static str {
        match self {
            CausalRelation::Spacelike => "spacelike",
            CausalRelation::InFuture => "future",
            CausalRelation::InPast => "past",
            CausalRelation::BoundaryNullFuture => "null-future",
            CausalRelation::BoundaryNullPast => "null-past",
        }
    }
}

/// Bounding slab × ball for the support of `χ(t)·F(x)`.
#[derive(Clone, Debug)]
pub struct InteractionRegion {
    pub t_on: f64,
    pub t_off: f64,
    pub spatial_center: Vec<f64>,
    pub spatial_radius: f64,
    /// Fraction of the profile L¹ mass enclosed (1 for compact profiles).
    pub effective_support_level: f64,
}

impl InteractionRegion {
    pub fn new(
        t_on: f64,
        t_off: f64,
        spatial_center: Vec<f64>,
        spatial_radius: f64,
        effective_support_level: f64,
    ) -> Result<InteractionRegion> {
        if t_on > t_off {
            return Err(Error::InvalidConfiguration(format!(
                "region requires t_on <= t_off, got [{t_on}, {t_off}]"
            )));
        }
        if spatial_radius < 0.0 {
            return Err(Error::InvalidConfiguration("negative spatial radius".into()));
        }
        if !(effective_support_level > 0.0 && effective_support_level <= 1.0) {
            return Err(Error::InvalidConfiguration(
                "effective support level must be in (0, 1]".into(),
            ));
        }
        Ok(InteractionRegion {
            t_on,
            t_off,
            spatial_center,
            spatial_radius,
            effective_support_level,
        })
    }

    pub fn dim(&self) -> usize {
        self.spatial_center.len()
    }

    pub fn temporal_midpoint(&self) -> f64 {
        0.5 * (self.t_on + self.t_off)
    }

    /// Smallest spatial distance from a point to the bounding ball.
    fn ball_distance(&self, x: &[f64]) -> f64 {
        let d: f64 = x
            .iter()
            .zip(&self.spatial_center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        (d - self.spatial_radius).max(0.0)
    }
}

/// Classify an event against the bounding slab × ball of a region. The light
/// cone boundary (null contact, within floating point tolerance) is reported
/// as the dedicated boundary variants.
pub fn classify(event: &Event, region: &InteractionRegion) -> CausalRelation {
    assert_eq!(event.dim(), region.dim(), "event/region dimension mismatch");
    let d = region.ball_distance(event.x());
    let scale = 1e-12
        * (1.0 + event.t.abs() + region.t_on.abs() + region.t_off.abs() + d.abs());
    // future: reachable from the earliest emission point
    let future_slack = (event.t - region.t_on) - d;
    // past: can reach the latest absorption point
    let past_slack = (region.t_off - event.t) - d;
    let in_future = future_slack > scale;
    let in_past = past_slack > scale;
    if in_future && in_past {
        // overlap zone (event within light reach of the whole slab): label by
        // which side of the temporal midpoint it sits on
        return if event.t >= region.temporal_midpoint() {
            CausalRelation::InFuture
        } else {
            CausalRelation::InPast
        };
    }
    if in_future {
        return CausalRelation::InFuture;
    }
    if in_past {
        return CausalRelation::InPast;
    }
    if future_slack >= -scale {
        return CausalRelation::BoundaryNullFuture;
    }
    if past_slack >= -scale {
        return CausalRelation::BoundaryNullPast;
    }
    CausalRelation::Spacelike
}

/// Membership of the event in the causal future J⁺ of the region (null
/// boundary included). Unlike [`classify`], events inside the region itself
/// always count, whichever single label `classify` reports.
pub fn in_causal_future(event: &Event, region: &InteractionRegion) -> bool {
    let d = region.ball_distance(event.x());
    let scale = 1e-12
        * (1.0 + event.t.abs() + region.t_on.abs() + region.t_off.abs() + d.abs());
    (event.t - region.t_on) - d >= -scale
}

/// Membership in the causal support J = J⁺ ∪ J⁻.
pub fn in_causal_support(event: &Event, region: &InteractionRegion) -> bool {
    let d = region.ball_distance(event.x());
    let scale = 1e-12
        * (1.0 + event.t.abs() + region.t_on.abs() + region.t_off.abs() + d.abs());
    in_causal_future(event, region) || (region.t_off - event.t) - d >= -scale
}

/// Bounding interaction region of a switching/smearing pair at the default
/// support level.
pub fn region_of(chi: &Profile, f: &Profile) -> Result<InteractionRegion> {
    region_of_at_level(chi, f, crate::profiles::DEFAULT_SUPPORT_LEVEL)
}

/// Bounding interaction region enclosing `level` of each profile's L¹ mass.
pub fn region_of_at_level(chi: &Profile, f: &Profile, level: f64) -> Result<InteractionRegion> {
    if chi.dim != 1 {
        return Err(Error::DimensionMismatch("switching profile must be 1-dimensional".into()));
    }
    if !chi.mass().is_finite() || !f.mass().is_finite() {
        return Err(Error::InvalidConfiguration("profile mass is not finite".into()));
    }
    let compact = |p: &Profile| {
        !matches!(p.kind, crate::profiles::ProfileKind::Gaussian { .. })
    };
    let eff_level = if compact(chi) && compact(f) { 1.0 } else { level };
    let (t_on, t_off) = chi.support_interval(eff_level);
    let radius = f.support_radius(eff_level);
    InteractionRegion::new(t_on, t_off, f.center().to_vec(), radius, eff_level)
}
