//! Horofunctions of the polygonal Heisenberg metric.
//!
//! Every boundary function is constant on vertical fibres and is one of
//! - `Linear`: a covector on the boundary of the dual ball;
//! - `NormType`: `f(v) = |w| - |w - v|`;
//! - `TwoPiece`: one of the four two-piece families with crease `omega(v_i, .) = C`.
//!
//! With `mix_i(s) = (1-s) alpha_{i-1} + s alpha_i`:
//! ```text
//! psi_vee  = (alpha_{i-1} - a+) max (mix_i(s) + a-)
//! psi_wedge= (alpha_{i-1} - a-) min (mix_i(s) + a+)
//! xi_vee   = (alpha_i     - a+) max (mix_i(s) + a-)
//! xi_wedge = (alpha_i     - a-) min (mix_i(s) + a+)
//! ```
//! where `a+ = max(a, 0)` and `a- = min(a, 0)`. The crease sits at
//! `-s kappa_i omega(v_i, v) = a` for psi and `(1-s) kappa_i omega(v_i, v) = a` for xi.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::HeisPoint;
use crate::plane::{omega, Covector, Vec2};
use crate::polygon::Polygon;
use crate::sphere::{classify_sphere_point, SphereClass};

/// Parameter tolerance for `s` and covector comparisons.
pub const PARAM_TOL: f64 = 1e-9;
/// Residual allowed when re-fitting a translated horofunction.
pub const ACTION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PsiVee,
    PsiWedge,
    XiVee,
    XiWedge,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::PsiVee, Family::PsiWedge, Family::XiVee, Family::XiWedge];

    pub fn is_psi(self) -> bool {
        matches!(self, Family::PsiVee | Family::PsiWedge)
    }

    pub fn is_max(self) -> bool {
        matches!(self, Family::PsiVee | Family::XiVee)
    }

    /// True when the anchor piece occupies `{omega(v_i, .) >= C}`.
    pub fn anchor_above(self) -> bool {
        matches!(self, Family::PsiWedge | Family::XiVee)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::PsiVee => "psi_vee",
            Family::PsiWedge => "psi_wedge",
            Family::XiVee => "xi_vee",
            Family::XiWedge => "xi_wedge",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Horofunction {
    Linear { beta: Covector },
    NormType { w: Vec2 },
    TwoPiece { i: usize, family: Family, s: f64, a: f64 },
}

#[inline]
fn pos(a: f64) -> f64 {
    a.max(0.0)
}

#[inline]
fn neg(a: f64) -> f64 {
    a.min(0.0)
}

impl Horofunction {
    /// Canonical constructor for the two-piece families.
    ///
    /// Degenerate parameters collapse: `psi(s = 0)` is `alpha_{i-1}`, `xi(s = 1)` is
    /// `alpha_i`, `a = +-inf` keeps a single piece, and `xi(s = 0, a)` is stored as
    /// `psi(s = 1, -a)`.
    pub fn two_piece(g: &Polygon, i: usize, family: Family, s: f64, a: f64) -> Result<Horofunction> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidS(s));
        }
        if a.is_nan() {
            return Err(Error::InvalidArgument("a is NaN".into()));
        }
        let i = g.wrap(i as isize);
        let anchor = if family.is_psi() { g.alpha(i as isize - 1) } else { g.alpha(i as isize) };
        let mix = g.mix(i as isize, s);
        if family.is_psi() && s <= PARAM_TOL {
            return Ok(Horofunction::Linear { beta: anchor });
        }
        if !family.is_psi() && s >= 1.0 - PARAM_TOL {
            return Ok(Horofunction::Linear { beta: anchor });
        }
        if a.is_infinite() {
            let mix_wins = (a > 0.0) == family.is_max();
            return Ok(Horofunction::Linear { beta: if mix_wins { mix } else { anchor } });
        }
        if !family.is_psi() && s <= PARAM_TOL {
            let twin = if family.is_max() { Family::PsiVee } else { Family::PsiWedge };
            return Ok(Horofunction::TwoPiece { i, family: twin, s: 1.0, a: -a });
        }
        Ok(Horofunction::TwoPiece { i, family, s, a })
    }

    pub fn eval(&self, x: HeisPoint, g: &Polygon) -> f64 {
        self.eval_plane(x.project(), g)
    }

    /// Value at any point over `v`; horofunctions ignore the vertical coordinate.
    pub fn eval_plane(&self, v: Vec2, g: &Polygon) -> f64 {
        match *self {
            Horofunction::Linear { beta } => beta.apply(v),
            Horofunction::NormType { w } => g.gauge(w) - g.gauge(w - v),
            Horofunction::TwoPiece { i, family, s, a } => {
                let i = i as isize;
                let anchor = if family.is_psi() { g.alpha(i - 1) } else { g.alpha(i) };
                let m = g.mix(i, s).apply(v);
                let x = anchor.apply(v);
                if family.is_max() {
                    (x - pos(a)).max(m + neg(a))
                } else {
                    (x - neg(a)).min(m + pos(a))
                }
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Horofunction::Linear { .. })
    }
}

/// Planar horofunction `(1-s) alpha_{i-1} + s alpha_i`.
pub fn planar_horofunction(g: &Polygon, i: usize, s: f64) -> Result<Covector> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidS(s));
    }
    Ok(g.mix(i as isize, s))
}

/// Crease `C` to family coordinate `a`.
pub fn a_from_threshold(g: &Polygon, i: usize, family: Family, s: f64, c: f64) -> f64 {
    let k = g.kappa(i as isize);
    if family.is_psi() {
        -s * k * c
    } else {
        (1.0 - s) * k * c
    }
}

/// Family coordinate `a` to crease `C`; infinite when the crease is at infinity.
pub fn threshold_from_a(g: &Polygon, i: usize, family: Family, s: f64, a: f64) -> f64 {
    let k = g.kappa(i as isize);
    let w = if family.is_psi() { -s * k } else { (1.0 - s) * k };
    a / w
}

/// The member of `family` whose crease is `{omega(v_i, .) = C}`; `C` may be infinite.
pub fn two_piece_from_threshold(g: &Polygon, i: usize, s: f64, c: f64, family: Family) -> Result<Horofunction> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidS(s));
    }
    if c.is_nan() {
        return Err(Error::InvalidArgument("C is NaN".into()));
    }
    let a = if c.is_infinite() {
        // sign of a for C -> +inf, unless the weight vanishes (degenerate anyway)
        let w = if family.is_psi() { -s } else { 1.0 - s };
        if w == 0.0 {
            0.0
        } else {
            f64::INFINITY * c.signum() * w.signum()
        }
    } else {
        a_from_threshold(g, i, family, s, c)
    };
    Horofunction::two_piece(g, i, family, s, a)
}

/// Piecewise presentation: `below + c_below` on `{omega(v_i, .) <= C}`, `above + c_above` beyond.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdView {
    pub i: usize,
    pub c: f64,
    pub below: Covector,
    pub c_below: f64,
    pub above: Covector,
    pub c_above: f64,
}

impl ThresholdView {
    pub fn eval_plane(&self, v: Vec2, g: &Polygon) -> f64 {
        if omega(g.v(self.i as isize), v) <= self.c {
            self.below.apply(v) + self.c_below
        } else {
            self.above.apply(v) + self.c_above
        }
    }
}

/// Threshold presentation of a two-piece function, with constants fixed by
/// continuity and `f(0) = 0`.
pub fn threshold_view(h: &Horofunction, g: &Polygon) -> Option<ThresholdView> {
    let Horofunction::TwoPiece { i, family, s, a } = *h else { return None };
    let ii = i as isize;
    let anchor = if family.is_psi() { g.alpha(ii - 1) } else { g.alpha(ii) };
    let mix = g.mix(ii, s);
    let c = threshold_from_a(g, i, family, s, a);
    let (below, above) = if family.anchor_above() { (mix, anchor) } else { (anchor, mix) };
    // above - below = lambda * omega(v_i, .)
    let diff = above - below;
    let vi = g.v(ii);
    let lambda = if vi.x.abs() > vi.y.abs() { diff.b / vi.x } else { -diff.a / vi.y };
    let (c_below, c_above) = if c >= 0.0 { (0.0, -lambda * c) } else { (lambda * c, 0.0) };
    Some(ThresholdView { i, c, below, c_below, above, c_above })
}

/// Blow-up families at a sphere point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BlowUpFamily {
    /// Smooth points and star tips: the Pansu derivative only.
    Singleton { class: SphereClass, h: Horofunction },
    /// Poles: all `NormType`, and for each `i` the `psi_wedge(1, .)` family over `C`.
    Pole { class: SphereClass },
    /// A single two-piece family over `C in [-inf, inf]` with fixed `i`, `s`.
    Crease { class: SphereClass, i: usize, family: Family, s: f64 },
}

/// Selects one member of a blow-up family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "member")]
pub enum Member {
    Only,
    Norm { w: Vec2 },
    Crease { i: usize, c: f64 },
}

impl BlowUpFamily {
    pub fn class(&self) -> SphereClass {
        match *self {
            BlowUpFamily::Singleton { class, .. }
            | BlowUpFamily::Pole { class }
            | BlowUpFamily::Crease { class, .. } => class,
        }
    }

    pub fn instantiate(&self, g: &Polygon, m: &Member) -> Result<Horofunction> {
        match (*self, *m) {
            (BlowUpFamily::Singleton { h, .. }, Member::Only) => Ok(h),
            (BlowUpFamily::Pole { .. }, Member::Norm { w }) => {
                if !w.is_finite() {
                    return Err(Error::UnreachableTarget("w must be finite".into()));
                }
                Ok(Horofunction::NormType { w })
            }
            (BlowUpFamily::Pole { .. }, Member::Crease { i, c }) if i < g.len() => {
                two_piece_from_threshold(g, i, 1.0, c, Family::PsiWedge)
            }
            (BlowUpFamily::Crease { i, family, s, .. }, Member::Crease { i: j, c }) if i == j => {
                two_piece_from_threshold(g, i, s, c, family)
            }
            (fam, m) => Err(Error::UnreachableTarget(format!("{m:?} is not a member of {fam:?}"))),
        }
    }

    /// Crease vertex index for single-family blow-ups.
    pub fn crease_index(&self) -> Option<usize> {
        match *self {
            BlowUpFamily::Crease { i, .. } => Some(i),
            _ => None,
        }
    }
}

/// Blow-up family at a sphere point, from its classification.
pub fn blow_up_family_at(g: &Polygon, p: HeisPoint) -> Result<BlowUpFamily> {
    let class = classify_sphere_point(g, p, 1e-7)?;
    family_for_class(g, p, class)
}

/// Blow-up family for an already classified sphere point.
pub fn family_for_class(g: &Polygon, p: HeisPoint, class: SphereClass) -> Result<BlowUpFamily> {
    let n = g.len();
    Ok(match class {
        SphereClass::NorthPole | SphereClass::SouthPole => BlowUpFamily::Pole { class },
        SphereClass::Vertex { i } => BlowUpFamily::Crease { class, i, family: Family::PsiVee, s: 1.0 },
        SphereClass::NorthStarSeam { i, r } => BlowUpFamily::Crease { class, i, family: Family::PsiWedge, s: r },
        SphereClass::SouthStarSeam { i, r } => BlowUpFamily::Crease { class, i, family: Family::XiWedge, s: 1.0 - r },
        SphereClass::WallCeilingSeam { i, s, .. } => {
            BlowUpFamily::Crease { class, i: (i + 1) % n, family: Family::PsiVee, s }
        }
        SphereClass::WallBasementSeam { i, r, .. } => BlowUpFamily::Crease { class, i, family: Family::XiVee, s: 1.0 - r },
        _ => {
            let beta = crate::distance::pansu_on_sphere(g, p)?;
            BlowUpFamily::Singleton { class, h: Horofunction::Linear { beta } }
        }
    })
}

/// The translated horofunction `x -> f(g^{-1} x) - f(g^{-1})` by its defining formula.
pub fn act_direct(g_el: HeisPoint, h: &Horofunction, g: &Polygon, v: Vec2) -> f64 {
    let u = g_el.project();
    h.eval_plane(v - u, g) - h.eval_plane(-u, g)
}

fn probe_grid() -> Vec<Vec2> {
    let mut out = Vec::with_capacity(169);
    for a in -6..=6 {
        for b in -6..=6 {
            out.push(Vec2::new(0.5 * a as f64, 0.5 * b as f64));
        }
    }
    out
}

/// Closed-form candidate for `g_el . h`, before verification.
fn act_candidate(g_el: HeisPoint, h: &Horofunction, g: &Polygon) -> Result<Horofunction> {
    let u = g_el.project();
    Ok(match *h {
        Horofunction::Linear { .. } => *h,
        Horofunction::NormType { w } => Horofunction::NormType { w: w + u },
        Horofunction::TwoPiece { i, family, s, a } => {
            let c = threshold_from_a(g, i, family, s, a) + omega(g.v(i as isize), u);
            Horofunction::two_piece(g, i, family, s, a_from_threshold(g, i, family, s, c))?
        }
    })
}

/// The group action on horofunctions, verified against the defining formula.
pub fn act(g_el: HeisPoint, h: &Horofunction, g: &Polygon) -> Result<Horofunction> {
    let cand = act_candidate(g_el, h, g)?;
    let u = g_el.project();
    let scale = 1.0 + u.norm2() + param_scale(h) + param_scale(&cand);
    let mut resid = 0.0f64;
    for v in probe_grid() {
        let direct = act_direct(g_el, h, g, v);
        resid = resid.max((direct - cand.eval_plane(v, g)).abs());
    }
    if resid > ACTION_TOL * scale {
        return Err(Error::ActionFit(resid));
    }
    Ok(cand)
}

fn param_scale(h: &Horofunction) -> f64 {
    match *h {
        Horofunction::Linear { .. } => 0.0,
        Horofunction::NormType { w } => w.norm2(),
        Horofunction::TwoPiece { a, .. } => a.abs(),
    }
}

/// Busemann functions: `Linear` at a dual vertex, or the vertex family `psi_vee(1, .)`.
pub fn is_busemann(h: &Horofunction, g: &Polygon) -> bool {
    match *h {
        Horofunction::Linear { beta } => g.alphas.iter().any(|a| a.dist_max(beta) <= PARAM_TOL),
        Horofunction::TwoPiece { family, s, .. } => family == Family::PsiVee && s >= 1.0 - PARAM_TOL,
        Horofunction::NormType { .. } => false,
    }
}

/// Reduced-boundary class: horofunctions modulo bounded difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum OrbitClass {
    NormType,
    Linear { beta: Covector },
    TwoPiece { family: Family, i: usize, s: f64 },
}

impl OrbitClass {
    pub fn same(&self, other: &OrbitClass) -> bool {
        match (*self, *other) {
            (OrbitClass::NormType, OrbitClass::NormType) => true,
            (OrbitClass::Linear { beta: a }, OrbitClass::Linear { beta: b }) => a.dist_max(b) <= PARAM_TOL,
            (
                OrbitClass::TwoPiece { family: f1, i: i1, s: s1 },
                OrbitClass::TwoPiece { family: f2, i: i2, s: s2 },
            ) => f1 == f2 && i1 == i2 && (s1 - s2).abs() <= PARAM_TOL,
            _ => false,
        }
    }
}

pub fn orbit_class(h: &Horofunction, _g: &Polygon) -> OrbitClass {
    match *h {
        Horofunction::NormType { .. } => OrbitClass::NormType,
        Horofunction::Linear { beta } => OrbitClass::Linear { beta },
        Horofunction::TwoPiece { i, family, s, .. } => OrbitClass::TwoPiece { family, i, s },
    }
}

/// Whether `h1 - h2` is bounded, decided from growth along rays.
///
/// Both functions are piecewise affine with finitely many pieces, so along each
/// ray the difference is eventually affine; it is bounded iff every eventual
/// slope vanishes. Rays cover a fine angular grid plus the vertex directions.
pub fn bounded_difference(h1: &Horofunction, h2: &Horofunction, g: &Polygon) -> bool {
    const NEAR: f64 = 1e3;
    const FAR: f64 = 1e6;
    let mut dirs: Vec<Vec2> = (0..720)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / 360.0;
            Vec2::new(t.cos(), t.sin())
        })
        .collect();
    for &v in &g.vertices {
        dirs.push(v / v.norm2());
        dirs.push(Vec2::new(-v.y, v.x) / v.norm2());
    }
    let gap = |r: f64, d: Vec2| h1.eval_plane(d * r, g) - h2.eval_plane(d * r, g);
    dirs.iter().all(|&d| (gap(FAR, d) - gap(NEAR, d)).abs() <= 1e-6 * (FAR - NEAR))
}

/// True when the orbit of `h` under the group is a single point.
pub fn has_finite_orbit(h: &Horofunction, g: &Polygon, probes: &[HeisPoint]) -> Result<bool> {
    for &q in probes {
        let image = act(q, h, g)?;
        let moved = probe_grid()
            .into_iter()
            .any(|v| (image.eval_plane(v, g) - h.eval_plane(v, g)).abs() > ACTION_TOL * (1.0 + param_scale(h)));
        if moved {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One record of the boundary atlas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasRecord {
    pub family: String,
    pub i: usize,
    pub s: f64,
    pub a: f64,
}

/// Canonical samples of every two-piece chart (indices 1-based).
pub fn atlas(g: &Polygon) -> Vec<AtlasRecord> {
    let mut out = Vec::new();
    for i in 0..g.len() {
        for family in Family::ALL {
            for s in [0.25, 0.5, 0.75, 1.0] {
                for a in [-1.0, 0.0, 1.0] {
                    if let Ok(Horofunction::TwoPiece { i: ci, family: cf, s: cs, a: ca }) =
                        Horofunction::two_piece(g, i, family, s, a)
                    {
                        out.push(AtlasRecord { family: cf.name().into(), i: ci + 1, s: cs, a: ca });
                    }
                }
            }
        }
    }
    out
}

/// SVG schematic: per index `i`, two discs (the psi and xi spheres) sharing a meridian,
/// with the meridian endpoints coloured by `alpha_{i-1}` and `alpha_i`.
pub fn atlas_svg(g: &Polygon) -> String {
    use crate::format::fmt_num;
    use crate::mesh::covector_color;
    let n = g.len();
    let (w, h) = (220.0, 150.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"11\">\n",
        fmt_num(w * n as f64),
        fmt_num(h)
    );
    for i in 0..n {
        let x0 = w * i as f64;
        let (c1, c2) = (x0 + 75.0, x0 + 145.0);
        let prev = covector_color(g.alpha(i as isize - 1));
        let next = covector_color(g.alpha(i as isize));
        s.push_str(&format!("<g id=\"chart_{}\">\n", i + 1));
        for (cx, label) in [(c1, "psi"), (c2, "xi")] {
            s.push_str(&format!(
                "<circle cx=\"{}\" cy=\"70\" r=\"40\" fill=\"none\" stroke=\"#444\"/>\n<text x=\"{}\" y=\"125\" text-anchor=\"middle\">{label}_{}</text>\n",
                fmt_num(cx),
                fmt_num(cx),
                i + 1
            ));
        }
        let mx = x0 + 110.0;
        s.push_str(&format!(
            "<line x1=\"{mx}\" y1=\"40\" x2=\"{mx}\" y2=\"100\" stroke=\"#000\" stroke-width=\"2\"/>\n\
             <circle cx=\"{mx}\" cy=\"40\" r=\"4\" fill=\"{prev}\"/>\n<circle cx=\"{mx}\" cy=\"100\" r=\"4\" fill=\"{next}\"/>\n",
            mx = fmt_num(mx)
        ));
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::fixtures::{hexagon, square};

    #[test]
    fn norm_type_at_zero_is_negative_gauge() {
        let g = hexagon();
        let h = Horofunction::NormType { w: Vec2::ZERO };
        let v = Vec2::new(0.4, -1.3);
        assert_eq!(h.eval_plane(v, &g), -g.gauge(v));
    }

    #[test]
    fn psi_vee_example() {
        // alpha_{-1} = (1, -1), alpha_0 = (1, 0)
        let g = hexagon();
        let h = Horofunction::two_piece(&g, 0, Family::PsiVee, 0.5, 0.0).unwrap();
        assert_eq!(h.eval(HeisPoint::new(0.0, 2.0, 7.0), &g), -1.0);
    }

    #[test]
    fn planar_horofunction_midpoint() {
        let g = hexagon();
        assert_eq!(planar_horofunction(&g, 0, 0.5).unwrap(), Covector::new(1.0, -0.5));
        assert_eq!(planar_horofunction(&g, 0, 0.0).unwrap(), g.alpha(-1));
        assert!(matches!(planar_horofunction(&g, 0, 1.5), Err(Error::InvalidS(_))));
    }

    #[test]
    fn infinite_thresholds_are_linear() {
        let g = hexagon();
        let up = two_piece_from_threshold(&g, 2, 0.4, f64::INFINITY, Family::PsiVee).unwrap();
        assert_eq!(up, Horofunction::Linear { beta: g.alpha(1) });
        let down = two_piece_from_threshold(&g, 2, 0.4, f64::NEG_INFINITY, Family::PsiVee).unwrap();
        assert_eq!(down, Horofunction::Linear { beta: g.mix(2, 0.4) });
    }

    #[test]
    fn zero_threshold_has_no_constants() {
        let g = square();
        for f in Family::ALL {
            let h = two_piece_from_threshold(&g, 1, 0.5, 0.0, f).unwrap();
            let t = threshold_view(&h, &g).unwrap();
            assert_eq!((t.c_below, t.c_above), (0.0, 0.0));
        }
    }

    #[test]
    fn xi_at_zero_is_stored_as_psi() {
        let g = hexagon();
        let h = Horofunction::two_piece(&g, 3, Family::XiVee, 0.0, 0.7).unwrap();
        assert_eq!(h, Horofunction::TwoPiece { i: 3, family: Family::PsiVee, s: 1.0, a: -0.7 });
    }

    #[test]
    fn threshold_view_agrees_with_closed_form() {
        let g = hexagon();
        for f in Family::ALL {
            let h = two_piece_from_threshold(&g, 0, 1.0, 1.0, f).unwrap();
            let t = match threshold_view(&h, &g) {
                Some(t) => t,
                None => continue,
            };
            for a in -10..=10 {
                for b in -10..=10 {
                    let v = Vec2::new(0.3 * a as f64, 0.3 * b as f64);
                    assert!((t.eval_plane(v, &g) - h.eval_plane(v, &g)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        let g = hexagon();
        let lin = Horofunction::Linear { beta: g.alpha(0) };
        assert_eq!(act(HeisPoint::new(3.0, -1.0, 2.0), &lin, &g).unwrap(), lin);
        let nt = Horofunction::NormType { w: Vec2::new(0.5, 0.5) };
        assert_eq!(
            act(HeisPoint::new(1.0, 0.0, 0.0), &nt, &g).unwrap(),
            Horofunction::NormType { w: Vec2::new(1.5, 0.5) }
        );
    }

    #[test]
    fn vertex_family_members_are_connected_by_translations() {
        let g = hexagon();
        let (c1, c2) = (1.5, -0.25);
        let h1 = two_piece_from_threshold(&g, 1, 1.0, c1, Family::PsiVee).unwrap();
        let h2 = two_piece_from_threshold(&g, 1, 1.0, c2, Family::PsiVee).unwrap();
        // omega(v_1, pi(g)) = C_2 - C_1 for a translation along J v_1
        let vi = g.v(1);
        let u = Vec2::new(-vi.y, vi.x) * ((c2 - c1) / omega(vi, Vec2::new(-vi.y, vi.x)));
        let moved = act(HeisPoint::from_parts(u, 0.3), &h1, &g).unwrap();
        let Horofunction::TwoPiece { a: am, .. } = moved else { panic!("not two-piece") };
        let Horofunction::TwoPiece { a: a2, .. } = h2 else { panic!("not two-piece") };
        assert!((am - a2).abs() < 1e-12);
    }

    #[test]
    fn busemann_examples() {
        let g = hexagon();
        assert!(is_busemann(&Horofunction::Linear { beta: g.alpha(0) }, &g));
        assert!(!is_busemann(&Horofunction::Linear { beta: g.mix(0, 0.5) }, &g));
        assert!(!is_busemann(&Horofunction::NormType { w: Vec2::new(1.0, 0.0) }, &g));
    }

    #[test]
    fn bounded_difference_examples() {
        let g = hexagon();
        let n1 = Horofunction::NormType { w: Vec2::new(1.0, 0.0) };
        let n2 = Horofunction::NormType { w: Vec2::new(5.0, 5.0) };
        assert!(bounded_difference(&n1, &n2, &g));
        let p1 = Horofunction::two_piece(&g, 0, Family::PsiVee, 0.5, 1.0).unwrap();
        let p2 = Horofunction::two_piece(&g, 0, Family::PsiVee, 0.5, -3.0).unwrap();
        assert!(bounded_difference(&p1, &p2, &g));
        let l1 = Horofunction::Linear { beta: g.alpha(0) };
        let l2 = Horofunction::Linear { beta: g.alpha(1) };
        assert!(!bounded_difference(&l1, &l2, &g));
        assert!(!bounded_difference(&l1, &n1, &g));
    }

    #[test]
    fn atlas_lists_every_chart() {
        let g = hexagon();
        let recs = atlas(&g);
        for i in 1..=6 {
            assert!(recs.iter().any(|r| r.i == i && r.family == "xi_wedge"));
        }
        let svg = atlas_svg(&g);
        assert_eq!(svg.matches("<g id=\"chart_").count(), 6);
    }
}
