//! The co-simulation: emulator, sensor board and servo on shared nets.

use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use super::measure::{self, angle_peaks};
use super::scenario::{Check, Scenario};
use crate::asm::ObjectImage;
use crate::mcs51::{pin_net_name, ClockConfig, Cpu, CpuError, Pins};
use crate::peripherals::{Comparator, RainSensor, SensorError, Servo};
use crate::sim::{
    measure_pulses, Event, Level, Logic, NetId, SimError, SimTime, Simulator, Trace, TraceSet,
};

pub const AO: &str = "AO";
pub const DO: &str = "DO";
pub const HEAVY: &str = "HEAVY";
pub const SERVO_PWM: &str = "SERVO_PWM";
pub const SERVO_ANGLE: &str = "SERVO_ANGLE";

/// Port pins carrying the three controller signals. Every other pin gets
/// its own `Pp.b` net.
pub const WIRING: [(&str, u8, u8); 3] = [(DO, 1, 0), (HEAVY, 1, 1), (SERVO_PWM, 2, 0)];

/// Servo angle sampling interval.
pub const ANGLE_SAMPLE: SimTime = SimTime::from_ms(1);

/// Pulses at most this wide still count as the parked 1 ms pulse.
pub const PARK_WIDTH_LIMIT: SimTime = SimTime::from_us(1010);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error("firmware image does not load: {0}")]
    Load(CpuError),
}

/// Emulator stop: the error plus where it happened.
#[derive(Debug, Clone, PartialEq)]
pub struct Halt {
    pub error: CpuError,
    pub cycle: u64,
    pub at: SimTime,
}

#[derive(Debug, Clone, Copy)]
struct Ids {
    ao: NetId,
    rain: NetId,
    heavy: NetId,
    pwm: NetId,
    angle: NetId,
}

struct Devices {
    ids: Ids,
    pins: Pins,
    light: Comparator,
    heavy: Comparator,
    servo: Servo,
    /// Port pin behind each net, indexed by net id.
    pin_of: Vec<Option<(u8, u8)>>,
}

impl Devices {
    fn on_event(&mut self, ev: &Event, sim: &mut Simulator) -> Result<(), SimError> {
        if ev.net == self.ids.ao {
            let ao = ev.new_level.as_analog().unwrap_or(0.0);
            for (net, comp) in [
                (self.ids.rain, &mut self.light),
                (self.ids.heavy, &mut self.heavy),
            ] {
                let out = Level::Digital(comp.update(ao));
                if sim.level(net) != out {
                    sim.schedule(Event {
                        at: ev.at,
                        net,
                        new_level: out,
                    })?;
                }
            }
            return Ok(());
        }
        let Some(level) = ev.new_level.as_logic() else {
            return Ok(());
        };
        if let Some((port, bit)) = self.pin_of[ev.net.0] {
            self.pins.set(port as usize, bit, level);
        }
        if ev.net == self.ids.pwm {
            self.servo.on_edge(ev.at, level);
        }
        Ok(())
    }
}

/// One scenario's worth of wired-up models.
pub struct Bench {
    sim: Simulator,
    cpu: Cpu,
    clock: ClockConfig,
    dev: Devices,
    /// Net driven by each port latch bit; `None` for sensor inputs.
    latch_net: [[Option<NetId>; 8]; 4],
    next_sample: SimTime,
    halt: Option<Halt>,
}

impl Bench {
    pub fn new(image: &ObjectImage, scenario: &Scenario) -> Result<Self, BenchError> {
        let cpu = Cpu::with_image(image).map_err(BenchError::Load)?;
        let sensor: RainSensor = scenario.sensor;
        sensor.validate()?;
        let first = scenario.schedule.first().map_or(0.0, |&(_, w)| w);
        let out = sensor.outputs(first)?;

        let mut sim = Simulator::new();
        let ao = sim.add_net(AO, Level::Analog(out.ao))?;
        let rain = sim.add_net(DO, Level::Digital(out.rain))?;
        let heavy = sim.add_net(HEAVY, Level::Digital(out.heavy))?;
        let pwm = sim.add_net(SERVO_PWM, Level::Digital(Logic::High))?;
        let angle = sim.add_net(SERVO_ANGLE, Level::Analog(0.0))?;
        let ids = Ids {
            ao,
            rain,
            heavy,
            pwm,
            angle,
        };

        let mut pins = Pins::default();
        let mut latch_net = [[None; 8]; 4];
        let mut pin_of = vec![None; 5];
        for port in 0..4u8 {
            for bit in 0..8u8 {
                let wired = WIRING.iter().find(|&&(_, p, b)| (p, b) == (port, bit));
                let id = match wired {
                    Some(&(name, _, _)) => sim.net_id(name)?,
                    None => sim.add_net(&pin_net_name(port, bit), Level::Digital(Logic::High))?,
                };
                if pin_of.len() <= id.0 {
                    pin_of.resize(id.0 + 1, None);
                }
                pin_of[id.0] = Some((port, bit));
                if id != rain && id != heavy {
                    latch_net[port as usize][bit as usize] = Some(id);
                }
                if let Some(l) = sim.level(id).as_logic() {
                    pins.set(port as usize, bit, l);
                }
            }
        }

        for &(ms, w) in &scenario.schedule {
            sim.schedule(Event {
                at: SimTime::from_ms(ms),
                net: ao,
                new_level: Level::Analog(sensor.analog_out(w)?),
            })?;
        }

        Ok(Bench {
            sim,
            cpu,
            clock: scenario.clock,
            dev: Devices {
                ids,
                pins,
                light: Comparator::new(sensor.pot_light, sensor.hysteresis, out.ao),
                heavy: Comparator::new(sensor.pot_heavy, sensor.hysteresis, out.ao),
                servo: Servo::new(0.0),
                pin_of,
            },
            latch_net,
            next_sample: ANGLE_SAMPLE,
            halt: None,
        })
    }

    pub fn cpu(&self) -> &Cpu {
        &self.cpu
    }

    pub fn servo(&self) -> &Servo {
        &self.dev.servo
    }

    pub fn halt(&self) -> Option<&Halt> {
        self.halt.as_ref()
    }

    pub fn now(&self) -> SimTime {
        self.sim.now()
    }

    pub fn traces(&self) -> TraceSet {
        self.sim.trace_set()
    }

    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.sim.net_id(name).ok().map(|id| self.sim.trace(id))
    }

    /// Delivers events and angle samples up to `t`.
    fn settle(&mut self, t: SimTime) -> Result<(), SimError> {
        let dev = &mut self.dev;
        while self.next_sample <= t {
            let s = self.next_sample;
            self.sim.run_until_with(s, |e, sim| dev.on_event(e, sim))?;
            let a = dev.servo.advance(s);
            self.sim.schedule(Event {
                at: s,
                net: dev.ids.angle,
                new_level: Level::Analog(a),
            })?;
            self.sim.run_until_with(s, |e, sim| dev.on_event(e, sim))?;
            self.next_sample = s + ANGLE_SAMPLE;
        }
        if self.sim.next_event_time().is_some_and(|e| e <= t) || self.sim.now() < t {
            self.sim.run_until_with(t, |e, sim| dev.on_event(e, sim))?;
        }
        Ok(())
    }

    /// Runs the emulator and the models up to `horizon`. An emulator fault
    /// stops the CPU (recorded in [`Bench::halt`]); the models keep running.
    pub fn run_until(&mut self, horizon: SimTime) -> Result<(), BenchError> {
        while self.halt.is_none() {
            let t = self.clock.time_of_cycle(self.cpu.cycle_count());
            if t > horizon {
                break;
            }
            if self.next_sample <= t || self.sim.next_event_time().is_some_and(|e| e <= t) {
                self.settle(t)?;
            }
            let before = self.cpu.port_latches();
            if let Err(error) = self.cpu.step(&self.dev.pins) {
                self.halt = Some(Halt {
                    error,
                    cycle: self.cpu.cycle_count(),
                    at: t,
                });
                break;
            }
            let after = self.cpu.port_latches();
            if before != after {
                let at = self.clock.time_of_cycle(self.cpu.cycle_count());
                for port in 0..4 {
                    let changed = before[port] ^ after[port];
                    for bit in 0..8 {
                        if changed & (1 << bit) == 0 {
                            continue;
                        }
                        if let Some(net) = self.latch_net[port][bit] {
                            self.sim.schedule(Event {
                                at,
                                net,
                                new_level: Level::Digital(Logic::from_bool(
                                    after[port] & (1 << bit) != 0,
                                )),
                            })?;
                        }
                    }
                }
            }
        }
        self.settle(horizon)?;
        Ok(())
    }
}

/// Result of evaluating one [`Check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    pub measured: Option<f64>,
    pub unit: &'static str,
    pub pass: bool,
}

/// Outcome of one scenario run. [`RunReport::render`] is a pure function
/// of the scenario and firmware; `wall_clock` is kept out of it.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub outcomes: Vec<CheckOutcome>,
    pub halt: Option<Halt>,
    pub rejected_pulses: u64,
    pub cycles: u64,
    pub traces: TraceSet,
    pub trace_files: Vec<PathBuf>,
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.halt.is_none() && self.outcomes.iter().all(|o| o.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "scenario {}: {}\n",
            self.scenario,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        if let Some(h) = &self.halt {
            out += &format!("  HALT {} (cycle {}, t={})\n", h.error, h.cycle, h.at);
        }
        for o in &self.outcomes {
            let measured = match o.measured {
                Some(v) => format!("{v:.3} {}", o.unit),
                None => "no measurement".to_string(),
            };
            out += &format!(
                "  {} {} -> {}\n",
                if o.pass { "PASS" } else { "FAIL" },
                o.check,
                measured
            );
        }
        out += &format!(
            "  cycles {}, rejected pulses {}\n",
            self.cycles, self.rejected_pulses
        );
        for f in &self.trace_files {
            let name = f.file_name().map_or_else(
                || f.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            out += &format!("  trace {name}\n");
        }
        out
    }
}

fn ms(t: SimTime) -> f64 {
    t.ns() as f64 / 1e6
}

fn us(t: SimTime) -> f64 {
    t.ns() as f64 / 1e3
}

/// Value farthest from `target` by `dist`, if any.
fn worst(values: impl IntoIterator<Item = f64>, dist: impl Fn(f64) -> f64) -> Option<f64> {
    values
        .into_iter()
        .max_by(|a, b| dist(*a).total_cmp(&dist(*b)))
}

type Measurement = (Option<f64>, &'static str, fn(&Check, f64) -> bool);

pub fn evaluate(check: &Check, traces: &TraceSet, horizon: SimTime) -> CheckOutcome {
    let empty = Trace::new();
    let pwm = traces.get(SERVO_PWM).unwrap_or(&empty);
    let angle = traces.get(SERVO_ANGLE).unwrap_or(&empty);
    let t = SimTime::from_ms;
    let (measured, unit, pass): Measurement = match *check {
        Check::SweepPeriod { from_ms, .. } => (
            measure::sweep_period(angle, t(from_ms)).map(ms),
            "ms",
            |c, v| matches!(c, Check::SweepPeriod { expected_ms, tol, .. } if tol.admits(*expected_ms, v)),
        ),
        Check::PulseCount { from_ms, to_ms, .. } => (
            Some(measure_pulses(pwm, t(from_ms), t(to_ms)).len() as f64),
            "pulses",
            |c, v| matches!(c, Check::PulseCount { expected, tol, .. } if tol.admits(*expected, v)),
        ),
        Check::ParkAngle {
            from_ms,
            to_ms,
            expected_deg,
            ..
        } => (
            worst(measure::analog_values(angle, t(from_ms), t(to_ms)), |v| {
                (v - expected_deg).abs()
            }),
            "deg",
            |c, v| matches!(c, Check::ParkAngle { expected_deg, tol, .. } if tol.admits(*expected_deg, v)),
        ),
        Check::FramePeriod {
            from_ms,
            to_ms,
            expected_ms,
            ..
        } => (
            worst(
                measure::rise_intervals(&measure_pulses(pwm, t(from_ms), t(to_ms)))
                    .into_iter()
                    .map(ms),
                |v| (v - expected_ms).abs(),
            ),
            "ms",
            |c, v| matches!(c, Check::FramePeriod { expected_ms, tol, .. } if tol.admits(*expected_ms, v)),
        ),
        Check::PulseWidth {
            from_ms,
            to_ms,
            min_us,
            max_us,
            ..
        } => (
            worst(
                measure_pulses(pwm, t(from_ms), t(to_ms))
                    .into_iter()
                    .map(|p| us(p.width)),
                |w| (min_us - w).max(w - max_us),
            ),
            "us",
            |c, w| {
                matches!(c, Check::PulseWidth { min_us, max_us, tol_us, .. }
                    if w >= min_us - tol_us && w <= max_us + tol_us)
            },
        ),
        Check::Onset { at_ms, .. } => (
            measure::first_pulse_wider(pwm, t(at_ms), horizon, PARK_WIDTH_LIMIT)
                .map(|p| ms(p.rise - t(at_ms))),
            "ms",
            |c, v| matches!(c, Check::Onset { within_ms, .. } if v <= *within_ms),
        ),
    };
    CheckOutcome {
        check: check.clone(),
        measured,
        unit,
        pass: measured.is_some_and(|v| pass(check, v)),
    }
}

/// Runs `scenario` against `image` and evaluates its checks.
pub fn run_scenario(scenario: &Scenario, image: &ObjectImage) -> Result<RunReport, BenchError> {
    let started = std::time::Instant::now();
    let mut bench = Bench::new(image, scenario)?;
    bench.run_until(scenario.horizon)?;
    let traces = bench.traces();
    let outcomes = scenario
        .checks
        .iter()
        .map(|c| evaluate(c, &traces, scenario.horizon))
        .collect();
    Ok(RunReport {
        scenario: scenario.name.clone(),
        outcomes,
        halt: bench.halt.clone(),
        rejected_pulses: bench.dev.servo.rejected(),
        cycles: bench.cpu.cycle_count(),
        traces,
        trace_files: Vec::new(),
        wall_clock: started.elapsed(),
    })
}

/// Times of the servo's stroke maxima, for callers that want more than
/// the mean period.
pub fn stroke_peaks(traces: &TraceSet, from: SimTime) -> Vec<SimTime> {
    traces
        .get(SERVO_ANGLE)
        .map(|t| angle_peaks(t, from, measure::PEAK_THRESHOLD_DEG))
        .unwrap_or_default()
}
