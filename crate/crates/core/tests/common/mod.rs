#![allow(dead_code)]

use eprkit_core::Direction;
use proptest::prelude::*;

pub fn direction_from(z: f64, phi: f64) -> Direction {
    let r = (1.0 - z * z).max(0.0).sqrt();
    Direction::new(r * phi.cos(), r * phi.sin(), z).unwrap()
}

pub fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| direction_from(z, phi))
}

/// Rotation by the unit quaternion `q = (w, x, y, z)`.
pub fn rotate(q: [f64; 4], v: &Direction) -> Direction {
    let [w, x, y, z] = q;
    let [vx, vy, vz] = v.components();
    let m = [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ];
    let r: Vec<f64> = m
        .iter()
        .map(|row| row[0] * vx + row[1] * vy + row[2] * vz)
        .collect();
    Direction::new(r[0], r[1], r[2]).unwrap()
}

pub fn rotation() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("non-degenerate", |q| {
            q.iter().map(|v| v * v).sum::<f64>() > 1e-3
        })
        .prop_map(|q| {
            let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            q.map(|v| v / n)
        })
}
