//! Planar predicates. Every combinatorial decision goes through `TOL`.

pub(crate) const TOL: f64 = 1e-12;

pub(crate) type P2 = [f64; 2];

pub(crate) fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dist(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Twice the signed area of `abc`; positive when counter-clockwise.
pub(crate) fn orient(a: P2, b: P2, c: P2) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Signed distance of `p` from the line through `a, b`, positive on the left.
pub(crate) fn side_distance(a: P2, b: P2, p: P2) -> f64 {
    orient(a, b, p) / dist(a, b)
}

/// Strictly inside the counter-clockwise triangle `t`, at least `margin`
/// away from every side.
pub(crate) fn strictly_inside(t: &[P2; 3], p: P2, margin: f64) -> bool {
    (0..3).all(|i| side_distance(t[i], t[(i + 1) % 3], p) > margin.max(TOL))
}

fn on_segment(a: P2, b: P2, p: P2) -> bool {
    p[0] >= a[0].min(b[0]) - TOL
        && p[0] <= a[0].max(b[0]) + TOL
        && p[1] >= a[1].min(b[1]) - TOL
        && p[1] <= a[1].max(b[1]) + TOL
}

/// Whether closed segments `ab` and `cd` meet. Callers skip pairs sharing an
/// endpoint.
pub(crate) fn segments_meet(a: P2, b: P2, c: P2, d: P2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > TOL && d2 < -TOL) || (d1 < -TOL && d2 > TOL)) && ((d3 > TOL && d4 < -TOL) || (d3 < -TOL && d4 > TOL)) {
        return true;
    }
    (d1.abs() <= TOL && on_segment(c, d, a))
        || (d2.abs() <= TOL && on_segment(c, d, b))
        || (d3.abs() <= TOL && on_segment(a, b, c))
        || (d4.abs() <= TOL && on_segment(a, b, d))
}
