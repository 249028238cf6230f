use serde::{Deserialize, Serialize};

use super::{PersonState, SceneLayout, SPEED_OF_LIGHT};
use crate::geometry::{Point2, Segment};

/// Tolerance used to distinguish a bounce endpoint from a genuine wall
/// crossing when counting transmission losses.
const PARAM_EPS: f64 = 1e-9;

/// One resolved multipath component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathComponent {
    /// Signed linear amplitude (free-space decay times wall interactions).
    pub amplitude: f64,
    /// Propagation delay in seconds.
    pub delay_s: f64,
    /// Number of specular reflections along the path.
    pub order: usize,
    /// Propagation geometry: tx, bounce points, rx.
    pub polyline: Vec<Point2>,
}

impl PathComponent {
    pub fn length(&self) -> f64 {
        self.polyline.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Excess delay relative to the straight tx-rx distance.
    pub fn excess_delay(&self, tx: Point2, rx: Point2) -> f64 {
        self.delay_s - tx.distance(rx) / SPEED_OF_LIGHT
    }

    /// Unit vector of the final leg, pointing into the receiver.
    pub fn arrival_direction(&self) -> Point2 {
        let n = self.polyline.len();
        (self.polyline[n - 1] - self.polyline[n - 2]).normalized()
    }
}

/// Enumerate specular multipath between `tx` and `rx` with the image method,
/// up to `max_order` reflections. The direct path is always present; the
/// result is sorted by delay.
pub fn enumerate_paths(
    layout: &SceneLayout,
    tx: Point2,
    rx: Point2,
    max_order: usize,
) -> Vec<PathComponent> {
    assert!(tx != rx, "enumerate_paths requires tx != rx");
    let mut out = Vec::new();

    out.push(finish_path(layout, vec![tx, rx], 0, 1.0));

    if max_order > 0 && !layout.walls.is_empty() {
        let mut seq = Vec::with_capacity(max_order);
        let mut images = vec![tx];
        recurse(layout, tx, rx, max_order, &mut seq, &mut images, &mut out);
    }

    out.sort_by(|a, b| {
        a.delay_s
            .partial_cmp(&b.delay_s)
            .unwrap()
            .then(a.order.cmp(&b.order))
    });
    out
}

fn recurse(
    layout: &SceneLayout,
    tx: Point2,
    rx: Point2,
    max_order: usize,
    seq: &mut Vec<usize>,
    images: &mut Vec<Point2>,
    out: &mut Vec<PathComponent>,
) {
    for w in 0..layout.walls.len() {
        if seq.last() == Some(&w) {
            continue;
        }
        let image = layout.walls[w]
            .segment
            .mirror_point(*images.last().unwrap());
        seq.push(w);
        images.push(image);

        if let Some(polyline) = backtrace(layout, tx, rx, seq, images) {
            let gain: f64 = seq
                .iter()
                .map(|&i| layout.walls[i].reflection_coeff)
                .product();
            out.push(finish_path(layout, polyline, seq.len(), gain));
        }
        if seq.len() < max_order {
            recurse(layout, tx, rx, max_order, seq, images, out);
        }

        images.pop();
        seq.pop();
    }
}

/// Walk back from the receiver towards each image in turn, checking that
/// every specular point falls on its (finite) wall segment.
fn backtrace(
    layout: &SceneLayout,
    tx: Point2,
    rx: Point2,
    seq: &[usize],
    images: &[Point2],
) -> Option<Vec<Point2>> {
    let mut bounces = Vec::with_capacity(seq.len());
    let mut target = rx;
    for (j, &w) in seq.iter().enumerate().rev() {
        let image = images[j + 1];
        if target == image {
            return None;
        }
        let leg = Segment::new(target, image);
        let (t, u) = leg.intersect(&layout.walls[w].segment)?;
        if !(PARAM_EPS..=1.0 - PARAM_EPS).contains(&t) || !(0.0..=1.0).contains(&u) {
            return None;
        }
        target = leg.point_at(t);
        bounces.push(target);
    }
    let mut polyline = Vec::with_capacity(seq.len() + 2);
    polyline.push(tx);
    polyline.extend(bounces.into_iter().rev());
    polyline.push(rx);
    Some(polyline)
}

/// Apply free-space decay and wall-crossing losses to a validated geometry.
fn finish_path(
    layout: &SceneLayout,
    polyline: Vec<Point2>,
    order: usize,
    reflection_gain: f64,
) -> PathComponent {
    let length: f64 = polyline.windows(2).map(|w| w[0].distance(w[1])).sum();
    let mut amplitude = reflection_gain / length;
    for leg in polyline.windows(2) {
        let seg = Segment::new(leg[0], leg[1]);
        for wall in &layout.walls {
            if let Some((t, u)) = seg.intersect(&wall.segment) {
                // Intersections at the leg endpoints are the bounce points
                // themselves, not traversals.
                if t > PARAM_EPS && t < 1.0 - PARAM_EPS && (0.0..=1.0).contains(&u) {
                    amplitude *= db_to_amplitude(-wall.transmission_loss_db);
                }
            }
        }
    }
    PathComponent {
        amplitude,
        delay_s: length / SPEED_OF_LIGHT,
        order,
        polyline,
    }
}

/// Attenuate every path whose polyline passes within the person's radius.
/// Identity when the person is absent.
pub fn apply_person_shadowing(paths: &[PathComponent], person: &PersonState) -> Vec<PathComponent> {
    if !person.present {
        return paths.to_vec();
    }
    let factor = db_to_amplitude(-person.shadow_loss_db);
    paths
        .iter()
        .map(|p| {
            let blocked = p.polyline.windows(2).any(|w| {
                Segment::new(w[0], w[1]).distance_to_point(person.position) < person.radius
            });
            let mut out = p.clone();
            if blocked {
                out.amplitude *= factor;
            }
            out
        })
        .collect()
}

pub fn db_to_amplitude(db: f64) -> f64 {
    10.0_f64.powf(db / 20.0)
}
