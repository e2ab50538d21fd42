//! Exact orientation predicates on grid coordinates.
//!
//! Coordinates are bounded by [`super::MAX_COORD`], which keeps every
//! determinant below in range of the integer type used.

/// Sign of the cross product `(b - a) x (c - a)`: positive when `c` lies to
/// the left of the directed line `a -> b`.
#[inline]
pub fn orient2d(a: &[i64], b: &[i64], c: &[i64]) -> i64 {
    let (abx, aby) = (b[0] - a[0], b[1] - a[1]);
    let (acx, acy) = (c[0] - a[0], c[1] - a[1]);
    abx * acy - aby * acx
}

/// Positive when `d` lies inside the circle through `a, b, c` given in
/// counterclockwise order. Callers normalize orientation.
pub fn incircle(a: &[i64], b: &[i64], c: &[i64], d: &[i64]) -> i128 {
    let row = |p: &[i64]| {
        let x = (p[0] - d[0]) as i128;
        let y = (p[1] - d[1]) as i128;
        (x, y, x * x + y * y)
    };
    let (ax, ay, al) = row(a);
    let (bx, by, bl) = row(b);
    let (cx, cy, cl) = row(c);
    al * (bx * cy - by * cx) - bl * (ax * cy - ay * cx) + cl * (ax * by - ay * bx)
}

/// Signed volume of the tetrahedron `a, b, c, d` (times six).
pub fn orient3d(a: &[i64], b: &[i64], c: &[i64], d: &[i64]) -> i128 {
    let v = |p: &[i64]| {
        (
            (p[0] - a[0]) as i128,
            (p[1] - a[1]) as i128,
            (p[2] - a[2]) as i128,
        )
    };
    let (bx, by, bz) = v(b);
    let (cx, cy, cz) = v(c);
    let (dx, dy, dz) = v(d);
    bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) + bz * (cx * dy - cy * dx)
}

/// Whether three 3-D points are collinear.
pub fn collinear3(a: &[i64], b: &[i64], c: &[i64]) -> bool {
    let u = [
        (b[0] - a[0]) as i128,
        (b[1] - a[1]) as i128,
        (b[2] - a[2]) as i128,
    ];
    let w = [
        (c[0] - a[0]) as i128,
        (c[1] - a[1]) as i128,
        (c[2] - a[2]) as i128,
    ];
    u[1] * w[2] == u[2] * w[1] && u[2] * w[0] == u[0] * w[2] && u[0] * w[1] == u[1] * w[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert!(orient2d(&[0, 0], &[1, 0], &[0, 1]) > 0);
        assert!(orient2d(&[0, 0], &[1, 0], &[0, -1]) < 0);
        assert_eq!(orient2d(&[0, 0], &[1, 1], &[2, 2]), 0);

        // unit circle through (1,0), (0,1), (-1,0) in ccw order
        let (a, b, c) = ([10, 0], [0, 10], [-10, 0]);
        assert!(incircle(&a, &b, &c, &[0, 0]) > 0);
        assert!(incircle(&a, &b, &c, &[0, 20]) < 0);
        assert_eq!(incircle(&a, &b, &c, &[0, -10]), 0);

        let o = [0, 0, 0];
        assert!(orient3d(&o, &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]) > 0);
        assert_eq!(orient3d(&o, &[1, 0, 0], &[0, 1, 0], &[3, 4, 0]), 0);
        assert!(collinear3(&o, &[1, 2, 3], &[2, 4, 6]));
    }
}
