use super::{Level, Logic, SimTime, Trace};

/// One complete high pulse: rising edge time and width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pulse {
    pub rise: SimTime,
    pub width: SimTime,
}

/// Every complete high pulse whose rising and falling edges both lie in
/// `[from, to]`. A pulse still high at `to` is dropped. Non-digital traces
/// yield nothing.
pub fn measure_pulses(trace: &Trace, from: SimTime, to: SimTime) -> Vec<Pulse> {
    let mut out = Vec::new();
    let mut prev: Option<Logic> = None;
    let mut rise: Option<SimTime> = None;
    for &(at, level) in trace.points() {
        let Level::Digital(l) = level else {
            return Vec::new();
        };
        if at > to {
            break;
        }
        match (prev, l) {
            (Some(Logic::Low), Logic::High) if at >= from => rise = Some(at),
            (Some(Logic::High), Logic::Low) => {
                if let Some(r) = rise.take() {
                    out.push(Pulse {
                        rise: r,
                        width: at - r,
                    });
                }
            }
            _ => {}
        }
        prev = Some(l);
    }
    out
}
