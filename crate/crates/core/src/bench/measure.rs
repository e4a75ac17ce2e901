//! Measurements over finished traces.

use crate::sim::{measure_pulses, Level, Pulse, SimTime, Trace};

/// Angle an excursion must reach to count as a full stroke.
pub const PEAK_THRESHOLD_DEG: f64 = 170.0;

/// Time of each excursion's maximum in an analog angle trace. An excursion
/// is a maximal run of points at or above `threshold`; its peak is the
/// first point carrying the run's largest value.
pub fn angle_peaks(trace: &Trace, from: SimTime, threshold: f64) -> Vec<SimTime> {
    let mut peaks = Vec::new();
    let mut best: Option<(SimTime, f64)> = None;
    for &(at, level) in trace.points() {
        let Level::Analog(v) = level else {
            return Vec::new();
        };
        if at < from {
            continue;
        }
        if v >= threshold {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((at, v));
            }
        } else if let Some((t, _)) = best.take() {
            peaks.push(t);
        }
    }
    peaks.extend(best.map(|(t, _)| t));
    peaks
}

/// Mean interval between successive angle peaks; `None` with fewer than
/// three intervals.
pub fn sweep_period(trace: &Trace, from: SimTime) -> Option<SimTime> {
    let peaks = angle_peaks(trace, from, PEAK_THRESHOLD_DEG);
    if peaks.len() < 4 {
        return None;
    }
    let span = *peaks.last()? - peaks[0];
    Some(SimTime(span.ns() / (peaks.len() as u64 - 1)))
}

/// Intervals between successive pulse rises.
pub fn rise_intervals(pulses: &[Pulse]) -> Vec<SimTime> {
    pulses.windows(2).map(|w| w[1].rise - w[0].rise).collect()
}

/// Value of an analog trace over `[from, to]`: the level holding at `from`
/// and every change point up to `to`.
pub fn analog_values(trace: &Trace, from: SimTime, to: SimTime) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(Level::Analog(v)) = trace.level_at(from) {
        out.push(v);
    }
    for &(at, level) in trace.points() {
        if at > from && at <= to {
            if let Level::Analog(v) = level {
                out.push(v);
            }
        }
    }
    out
}

/// First pulse rising at or after `from` whose width exceeds `min_width`.
pub fn first_pulse_wider(
    trace: &Trace,
    from: SimTime,
    to: SimTime,
    min_width: SimTime,
) -> Option<Pulse> {
    measure_pulses(trace, from, to)
        .into_iter()
        .find(|p| p.width > min_width)
}
