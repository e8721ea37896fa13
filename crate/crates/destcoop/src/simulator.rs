//! Bit-exact, time-stepped simulation of the linear-deterministic network
//! with causal full-duplex destinations.
//!
//! Every signal in a scheme is linear in the message symbols, so the engine
//! tracks each transmitted/received vector as a matrix map from the global
//! message-seed vector to the signal levels. Decoding is then a rank
//! question: a decode step succeeds iff its target symbols lie in the row
//! span of the destination's observations up to the step's time (plus its
//! previously decoded symbols), checked with the exact solver
//! [`crate::gf_linalg::solve_determined`] before any value is read.
//!
//! Relay (destination) transmissions are expressed as a fixed linear filter
//! on the previous received vector plus a per-time correction map over the
//! message seed. The correction encodes the subtraction of already-decoded
//! signals; its legitimacy (the destination can actually compute it) is
//! established by the decode schedule, which verifies those phase-1 decodes
//! at strictly earlier times.

use crate::channel::LdChannel;
use crate::gf_linalg::{shift_matrix, solve_determined, GfMatrix, Solve};
use crate::schemes::{regime1_ld_rates, CaseTag};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Errors from scheme construction.
#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("scheme requires channel ({0}), got ({1})")]
    WrongChannel(String, String),
    #[error("channel is not in regime (i)")]
    NotRegimeI,
    #[error("horizon must be at least 1")]
    EmptyHorizon,
}

/// One contiguous block of message symbols: a named stream instance at one
/// block index, owned by one user, placed at a fixed level band.
#[derive(Debug, Clone, Serialize)]
pub struct Group {
    pub label: String,
    pub user: u8,
    /// First seed index (inclusive).
    pub start: usize,
    pub len: usize,
    /// Topmost transmit level of the band, 1-based.
    pub level: usize,
}

/// A single decode action: at `time`, destination `dest` recovers the
/// symbols of group `group` from its observations `Y[1..=time]` and its
/// previously decoded groups.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeStep {
    pub dest: u8,
    pub time: usize,
    pub group: usize,
}

/// Linear relay program: `X[t] = filter * Y[t-1] + corr[t-1]` where
/// `corr[t-1]` is a map over the message seed (and `X[1] = 0`).
#[derive(Debug, Clone)]
pub struct Relay {
    pub filter: GfMatrix,
    /// `corr[t]` feeds `X[t+1]`; index 0 is unused (held zero).
    pub corr: Vec<GfMatrix>,
}

/// A complete scheme: source maps per time step, relay programs, symbol
/// groups, and the decode schedule.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub name: &'static str,
    pub ch: LdChannel,
    pub t_len: usize,
    pub j_blocks: usize,
    pub seed_len: usize,
    pub groups: Vec<Group>,
    /// `x1[t-1]` is source 1's transmit map at time t.
    pub x1: Vec<GfMatrix>,
    pub x2: Vec<GfMatrix>,
    pub relay3: Relay,
    pub relay4: Relay,
    pub schedule: Vec<DecodeStep>,
    /// Rates credited on success (symbols per channel use per user; the
    /// boundary zero-padding vanishes as T grows and is not charged).
    pub nominal_rates: (f64, f64),
}

/// Outcome of one decode step.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeOutcome {
    pub label: String,
    pub dest: u8,
    pub time: usize,
    pub determined: bool,
    /// Recovered symbol values (empty when not determined).
    pub values: Vec<u64>,
}

/// One trace record: signal `node` at time `t`, level `level` (1-based).
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub node: &'static str,
    pub level: usize,
    pub value: u64,
}

/// Simulation report.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub t_horizon: usize,
    pub j_blocks: usize,
    pub decoded: Vec<DecodeOutcome>,
    pub success: bool,
    /// First step that failed to be uniquely determined, if any.
    pub failed_step: Option<String>,
    pub achieved_rates: (f64, f64),
    pub trace: Option<Vec<TraceRow>>,
}

/// Symbolic network execution plus the verified decode plan; independent of
/// concrete message values, so it can be reused across many seeds.
pub struct CompiledScheme<'a> {
    pub scheme: &'a Scheme,
    /// Received-signal maps `y3[t-1]`, `y4[t-1]`.
    pub y3: Vec<GfMatrix>,
    pub y4: Vec<GfMatrix>,
    /// Transmit maps (for traces and invariant checks).
    pub x3: Vec<GfMatrix>,
    pub x4: Vec<GfMatrix>,
    /// Per step: the recovery matrix over the stacked known rows, or `None`
    /// when the step's targets are not uniquely determined.
    plan: Vec<Option<GfMatrix>>,
    /// Row layout of the known stack per step: (observation times used,
    /// previously decoded groups used).
    known_layout: Vec<(usize, Vec<usize>)>,
}

fn unit_rows(group: &Group, seed_len: usize, p: u64) -> GfMatrix {
    let mut m = GfMatrix::zero(group.len, seed_len, p);
    for i in 0..group.len {
        m.set(i, group.start + i, 1);
    }
    m
}

/// Run the symbolic network equations and verify the decode schedule.
pub fn compile_scheme(scheme: &Scheme) -> CompiledScheme<'_> {
    let ch = &scheme.ch;
    let n = ch.n().max(1) as usize;
    let p = ch.p;
    let t_len = scheme.t_len;
    let g13 = shift_matrix(n, ch.n() as i64 - ch.n13 as i64, p);
    let g23 = shift_matrix(n, ch.n() as i64 - ch.n23 as i64, p);
    let g14 = shift_matrix(n, ch.n() as i64 - ch.n14 as i64, p);
    let g24 = shift_matrix(n, ch.n() as i64 - ch.n24 as i64, p);
    let gc = shift_matrix(n, ch.n() as i64 - ch.n_c as i64, p);

    let zero = GfMatrix::zero(n, scheme.seed_len, p);
    let mut x3 = Vec::with_capacity(t_len);
    let mut x4 = Vec::with_capacity(t_len);
    let mut y3 = Vec::with_capacity(t_len);
    let mut y4 = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let (x3t, x4t) = if t == 0 {
            (zero.clone(), zero.clone())
        } else {
            let corr3 = scheme.relay3.corr.get(t).unwrap_or(&zero);
            let corr4 = scheme.relay4.corr.get(t).unwrap_or(&zero);
            (
                scheme.relay3.filter.mul(&y3[t - 1]).add(corr3),
                scheme.relay4.filter.mul(&y4[t - 1]).add(corr4),
            )
        };
        let y3t = g13
            .mul(&scheme.x1[t])
            .add(&g23.mul(&scheme.x2[t]))
            .add(&gc.mul(&x4t));
        let y4t = g14
            .mul(&scheme.x1[t])
            .add(&g24.mul(&scheme.x2[t]))
            .add(&gc.mul(&x3t));
        x3.push(x3t);
        x4.push(x4t);
        y3.push(y3t);
        y4.push(y4t);
    }

    // Verify each decode step with the rank oracle. Known rows for a step at
    // destination d and time t: the destination's received maps for times
    // 1..=t plus unit rows of its previously determined groups.
    let mut decoded3: Vec<usize> = Vec::new();
    let mut decoded4: Vec<usize> = Vec::new();
    let mut plan = Vec::with_capacity(scheme.schedule.len());
    let mut known_layout = Vec::with_capacity(scheme.schedule.len());
    for step in &scheme.schedule {
        let (ys, decoded) = if step.dest == 3 {
            (&y3, &mut decoded3)
        } else {
            (&y4, &mut decoded4)
        };
        let group = &scheme.groups[step.group];
        let mut parts: Vec<GfMatrix> = ys[..step.time.min(t_len)].to_vec();
        for &g in decoded.iter() {
            parts.push(unit_rows(&scheme.groups[g], scheme.seed_len, p));
        }
        let refs: Vec<&GfMatrix> = parts.iter().collect();
        let known = GfMatrix::stack_all(&refs, scheme.seed_len, p);
        let target = unit_rows(group, scheme.seed_len, p);
        let recovery = match solve_determined(&known, &target) {
            Ok(Solve::Determined(r)) => Some(r),
            _ => None,
        };
        known_layout.push((step.time.min(t_len), decoded.clone()));
        if recovery.is_some() {
            decoded.push(step.group);
        }
        plan.push(recovery);
    }
    CompiledScheme {
        scheme,
        y3,
        y4,
        x3,
        x4,
        plan,
        known_layout,
    }
}

impl CompiledScheme<'_> {
    /// Whether every decode step in the schedule is uniquely determined.
    pub fn all_determined(&self) -> bool {
        self.plan.iter().all(|r| r.is_some())
    }

    /// Execute the scheme on concrete message symbols.
    pub fn run(&self, messages: &[u64], with_trace: bool) -> SimReport {
        let scheme = self.scheme;
        assert_eq!(
            messages.len(),
            scheme.seed_len,
            "message length must match the scheme's symbol count"
        );
        let t_len = scheme.t_len;
        let mut trace = if with_trace { Some(Vec::new()) } else { None };
        let mut y3v: Vec<Vec<u64>> = Vec::with_capacity(t_len);
        let mut y4v: Vec<Vec<u64>> = Vec::with_capacity(t_len);
        for t in 0..t_len {
            let vals = [
                ("x1", scheme.x1[t].mul_vec(messages)),
                ("x2", scheme.x2[t].mul_vec(messages)),
                ("x3", self.x3[t].mul_vec(messages)),
                ("x4", self.x4[t].mul_vec(messages)),
                ("y3", self.y3[t].mul_vec(messages)),
                ("y4", self.y4[t].mul_vec(messages)),
            ];
            if let Some(rows) = trace.as_mut() {
                for (node, v) in &vals {
                    for (i, &value) in v.iter().enumerate() {
                        rows.push(TraceRow {
                            t: t + 1,
                            node,
                            level: i + 1,
                            value,
                        });
                    }
                }
            }
            y3v.push(vals[4].1.clone());
            y4v.push(vals[5].1.clone());
        }

        let mut decoded = Vec::with_capacity(scheme.schedule.len());
        let mut failed_step = None;
        let mut ok_symbols = [0usize; 2];
        for (i, step) in scheme.schedule.iter().enumerate() {
            let group = &scheme.groups[step.group];
            let outcome = match &self.plan[i] {
                Some(recovery) => {
                    let (t_used, ref prev) = self.known_layout[i];
                    let ys = if step.dest == 3 { &y3v } else { &y4v };
                    let mut known_vals: Vec<u64> =
                        ys[..t_used].iter().flatten().copied().collect();
                    for &g in prev {
                        let gr = &scheme.groups[g];
                        known_vals.extend_from_slice(&messages[gr.start..gr.start + gr.len]);
                    }
                    let values = recovery.mul_vec(&known_vals);
                    debug_assert_eq!(
                        values,
                        messages[group.start..group.start + group.len].to_vec(),
                        "recovery matrix failed to reproduce the true symbols"
                    );
                    let own = (step.dest == 3 && group.user == 1)
                        || (step.dest == 4 && group.user == 2);
                    if own {
                        ok_symbols[(group.user - 1) as usize] += group.len;
                    }
                    DecodeOutcome {
                        label: group.label.clone(),
                        dest: step.dest,
                        time: step.time,
                        determined: true,
                        values,
                    }
                }
                None => {
                    if failed_step.is_none() {
                        failed_step =
                            Some(format!("dest {} t={} {}", step.dest, step.time, group.label));
                    }
                    DecodeOutcome {
                        label: group.label.clone(),
                        dest: step.dest,
                        time: step.time,
                        determined: false,
                        values: Vec::new(),
                    }
                }
            };
            decoded.push(outcome);
        }
        let success = failed_step.is_none();
        let achieved_rates = if success {
            scheme.nominal_rates
        } else {
            (
                ok_symbols[0] as f64 / t_len as f64,
                ok_symbols[1] as f64 / t_len as f64,
            )
        };
        SimReport {
            t_horizon: t_len,
            j_blocks: scheme.j_blocks,
            decoded,
            success,
            failed_step,
            achieved_rates,
            trace,
        }
    }
}

/// Compile and execute in one call.
pub fn run_ld_network(scheme: &Scheme, messages: &[u64], with_trace: bool) -> SimReport {
    compile_scheme(scheme).run(messages, with_trace)
}

// ---------------------------------------------------------------------------
// Scheme construction.
// ---------------------------------------------------------------------------

struct Builder {
    n: usize,
    p: u64,
    groups: Vec<Group>,
    index: HashMap<(String, usize), usize>,
    seed_len: usize,
}

impl Builder {
    fn new(ch: &LdChannel) -> Self {
        Builder {
            n: ch.n().max(1) as usize,
            p: ch.p,
            groups: Vec::new(),
            index: HashMap::new(),
            seed_len: 0,
        }
    }

    /// Register a symbol group (no-op returning `None` for empty groups).
    fn group(&mut self, stream: &str, t: usize, user: u8, len: usize, level: usize) -> Option<usize> {
        if len == 0 {
            return None;
        }
        let id = self.groups.len();
        self.groups.push(Group {
            label: format!("{stream}[{t}]"),
            user,
            start: self.seed_len,
            len,
            level,
        });
        self.index.insert((stream.to_string(), t), id);
        self.seed_len += len;
        Some(id)
    }

    fn lookup(&self, stream: &str, t: usize) -> Option<usize> {
        self.index.get(&(stream.to_string(), t)).copied()
    }

    /// Placement map: the group's symbols at its level band, zero elsewhere.
    fn map(&self, gid: Option<usize>) -> GfMatrix {
        let mut m = GfMatrix::zero(self.n, self.seed_len, self.p);
        if let Some(gid) = gid {
            let g = &self.groups[gid];
            for i in 0..g.len {
                if g.level - 1 + i < self.n {
                    m.set(g.level - 1 + i, g.start + i, 1);
                }
            }
        }
        m
    }

    fn map_of(&self, stream: &str, t: usize) -> GfMatrix {
        self.map(self.lookup(stream, t))
    }

    /// Place a group's symbols at an arbitrary level with a fixed field
    /// coefficient (used by hand-written relay transmissions).
    fn place(&self, stream: &str, t: usize, level: usize, coeff: i64) -> GfMatrix {
        let mut m = GfMatrix::zero(self.n, self.seed_len, self.p);
        if let Some(gid) = self.lookup(stream, t) {
            let g = &self.groups[gid];
            let c = coeff.rem_euclid(self.p as i64) as u64;
            for i in 0..g.len {
                if level - 1 + i < self.n {
                    m.set(level - 1 + i, g.start + i, c);
                }
            }
        }
        m
    }
}

fn zero_relay(n: usize, seed_len: usize, p: u64, t_len: usize) -> Relay {
    Relay {
        filter: GfMatrix::zero(n, n, p),
        corr: vec![GfMatrix::zero(n, seed_len, p); t_len],
    }
}

/// The hand-written reference scheme for the (5,2,2,5,1) channel:
/// `x_k = (u_k[t]; s_k[t]; z↑k[t]; s_k[t+1]; z↓k[t])` with
/// `s_k(1) = s_k(T+1) = 0`, destinations forwarding the negated, up-shifted
/// residual, and the lagged two-phase decode schedule.
pub fn build_example1_scheme(ch: &LdChannel, t_len: usize) -> Result<Scheme, BuildError> {
    let want = LdChannel::new(5, 2, 2, 5, 1);
    if (ch.n13, ch.n23, ch.n14, ch.n24, ch.n_c) != (5, 2, 2, 5, 1) {
        return Err(BuildError::WrongChannel(
            format!("{want:?}"),
            format!("{ch:?}"),
        ));
    }
    if t_len == 0 {
        return Err(BuildError::EmptyHorizon);
    }
    let mut b = Builder::new(ch);
    for t in 1..=t_len {
        for (user, u, s, zu, zd) in [(1u8, "u1", "s1", "zu1", "zd1"), (2, "u2", "s2", "zu2", "zd2")] {
            b.group(u, t, user, 1, 1);
            if t >= 2 {
                b.group(s, t, user, 1, 2);
            }
            b.group(zu, t, user, 1, 3);
            b.group(zd, t, user, 1, 5);
        }
    }
    let n = b.n;
    let (mut x1, mut x2) = (Vec::new(), Vec::new());
    let down2 = shift_matrix(n, 2, b.p);
    for t in 1..=t_len {
        let stack = |u: &str, s: &str, zu: &str, zd: &str, b: &Builder| {
            b.map_of(u, t)
                .add(&b.map_of(s, t))
                .add(&b.map_of(zu, t))
                .add(&down2.mul(&b.map_of(s, t + 1)))
                .add(&b.map_of(zd, t))
        };
        x1.push(stack("u1", "s1", "zu1", "zd1", &b));
        x2.push(stack("u2", "s2", "zu2", "zd2", &b));
    }
    // Destination transmissions, literally as displayed:
    // x3[t] = (-(s1[t]+u2[t-1]); -(z↓1[t-1]-u1[t-1]); 0; 0; 0).
    let mut relay3 = zero_relay(n, b.seed_len, b.p, t_len);
    let mut relay4 = zero_relay(n, b.seed_len, b.p, t_len);
    for t in 2..=t_len {
        let mk = |s: &str, u_other: &str, zd: &str, u_own: &str, b: &Builder| {
            b.place(s, t, 1, -1)
                .add(&b.place(u_other, t - 1, 1, -1))
                .add(&b.place(zd, t - 1, 2, -1))
                .add(&b.place(u_own, t - 1, 2, 1))
        };
        relay3.corr[t - 1] = mk("s1", "u2", "zd1", "u1", &b);
        relay4.corr[t - 1] = mk("s2", "u1", "zd2", "u2", &b);
    }
    // Lagged two-phase decode schedule.
    let mut schedule = Vec::new();
    for t in 1..=t_len {
        for (dest, u, s, zu) in [(3u8, "u1", "s1", "zu1"), (4, "u2", "s2", "zu2")] {
            for stream in [u, s, zu] {
                if let Some(g) = b.lookup(stream, t) {
                    schedule.push(DecodeStep { dest, time: t, group: g });
                }
            }
        }
    }
    for t in 1..=t_len {
        let lag = (t + 1).min(t_len);
        for (dest, u_other, zd) in [(3u8, "u2", "zd1"), (4, "u1", "zd2")] {
            if let Some(g) = b.lookup(u_other, t) {
                schedule.push(DecodeStep { dest, time: lag, group: g });
            }
            if let Some(g) = b.lookup(zd, t) {
                schedule.push(DecodeStep { dest, time: lag, group: g });
            }
        }
    }
    schedule.sort_by_key(|s| s.time);
    Ok(Scheme {
        name: "example1",
        ch: *ch,
        t_len,
        j_blocks: t_len,
        seed_len: b.seed_len,
        groups: b.groups,
        x1,
        x2,
        relay3,
        relay4,
        schedule,
        nominal_rates: (4.0, 4.0),
    })
}

/// The hand-written reference scheme for the (2,1,1,2,3) channel:
/// `x_k = (u_k[t]; z_k[t]; 0)` with `u_k(0) = u_k(T) = 0` and destinations
/// forwarding the other user's public symbol one step later.
pub fn build_example2_scheme(ch: &LdChannel, t_len: usize) -> Result<Scheme, BuildError> {
    let want = LdChannel::new(2, 1, 1, 2, 3);
    if (ch.n13, ch.n23, ch.n14, ch.n24, ch.n_c) != (2, 1, 1, 2, 3) {
        return Err(BuildError::WrongChannel(
            format!("{want:?}"),
            format!("{ch:?}"),
        ));
    }
    if t_len == 0 {
        return Err(BuildError::EmptyHorizon);
    }
    let mut b = Builder::new(ch);
    for t in 1..=t_len {
        if t < t_len {
            b.group("u1", t, 1, 1, 1);
            b.group("u2", t, 2, 1, 1);
        }
        b.group("z1", t, 1, 1, 2);
        b.group("z2", t, 2, 1, 2);
    }
    let (mut x1, mut x2) = (Vec::new(), Vec::new());
    for t in 1..=t_len {
        x1.push(b.map_of("u1", t).add(&b.map_of("z1", t)));
        x2.push(b.map_of("u2", t).add(&b.map_of("z2", t)));
    }
    // x3[t] = (u1[t-1]; 0; 0), x4[t] = (u2[t-1]; 0; 0).
    let n = b.n;
    let mut relay3 = zero_relay(n, b.seed_len, b.p, t_len);
    let mut relay4 = zero_relay(n, b.seed_len, b.p, t_len);
    for t in 2..=t_len {
        relay3.corr[t - 1] = shift_matrix(n, 0, b.p).mul(&b.map_of("u1", t - 1));
        relay4.corr[t - 1] = shift_matrix(n, 0, b.p).mul(&b.map_of("u2", t - 1));
    }
    let mut schedule = Vec::new();
    for t in 1..=t_len {
        for (dest, u_own, u_other, z_own) in [(3u8, "u1", "u2", "z1"), (4, "u2", "u1", "z2")] {
            if let Some(g) = b.lookup(u_own, t) {
                schedule.push(DecodeStep { dest, time: t, group: g });
            }
            if let Some(g) = b.lookup(u_other, t) {
                schedule.push(DecodeStep { dest, time: (t + 1).min(t_len), group: g });
            }
            if let Some(g) = b.lookup(z_own, t) {
                schedule.push(DecodeStep { dest, time: (t + 1).min(t_len), group: g });
            }
        }
    }
    schedule.sort_by_key(|s| s.time);
    Ok(Scheme {
        name: "example2",
        ch: *ch,
        t_len,
        j_blocks: t_len,
        seed_len: b.seed_len,
        groups: b.groups,
        x1,
        x2,
        relay3,
        relay4,
        schedule,
        nominal_rates: (2.0, 2.0),
    })
}

/// Per-user level-band layout of the weak-cooperation scheme: the
/// cooperative public band sits on top, the cooperative private band starts
/// below the levels that stay above the cross link's reach at the other
/// destination, the immediate private band below the cross link, and the
/// lagged private band below everything the other user's public band can
/// reach.
struct Bands {
    u_level: usize,
    s_level: usize,
    zu_level: usize,
    zd_level: usize,
    /// Anti-causal filter shift per future block.
    shift: i64,
}

fn bands_user1(ch: &LdChannel) -> Bands {
    let (n13, n23, n14, nc) = (ch.n13 as i64, ch.n23 as i64, ch.n14 as i64, ch.n_c as i64);
    Bands {
        u_level: 1,
        s_level: (n14 - nc).max(0) as usize + 1,
        zu_level: n14 as usize + 1,
        zd_level: (n13 + nc - n23).max(0) as usize + 1,
        shift: n13 + nc - n14 - n23,
    }
}

fn bands_user2(ch: &LdChannel) -> Bands {
    let (n23, n14, n24, nc) = (ch.n23 as i64, ch.n14 as i64, ch.n24 as i64, ch.n_c as i64);
    Bands {
        u_level: 1,
        s_level: (n23 - nc).max(0) as usize + 1,
        zu_level: n23 as usize + 1,
        zd_level: (n24 + nc - n14).max(0) as usize + 1,
        shift: n24 + nc - n14 - n23,
    }
}

/// Number of leading symbols of the cooperative private block at index `j`
/// (1-based) that must be zero so that nothing leaks before the relay loop
/// warms up: the cross-destination image of block `1+i` shifted `i` times by
/// the filter stays within the observable levels iff `i*shift < nC`.
fn s_prefix_pad(j: usize, shift: i64, nc: i64, r_s: i64) -> i64 {
    let i = (j - 1) as i64;
    (nc - i * shift).clamp(0, r_s)
}

/// General weak-cooperation (regime-(i)) scheme: uncoded symbol placement on
/// the level bands, anti-causal filtering of the cooperative private stream,
/// and residual-forwarding destinations. Case (b) silences destination 4 and
/// strips user 2 down to the public and lagged-private streams; the
/// no-cooperation branch returns the trivial silent program.
pub fn build_regime1_scheme(ch: &LdChannel, t_len: usize) -> Result<Scheme, BuildError> {
    if ch.n_c > ch.n_min() {
        return Err(BuildError::NotRegimeI);
    }
    if t_len == 0 {
        return Err(BuildError::EmptyHorizon);
    }
    let alloc = regime1_ld_rates(ch).expect("regime (i) checked above");
    // Mirrored-(b) channels are built by constructing the mirror channel's
    // case-(b) scheme and swapping the user/destination roles back.
    if alloc.case_tag == CaseTag::BSym {
        let m = LdChannel {
            n13: ch.n24,
            n23: ch.n14,
            n14: ch.n23,
            n24: ch.n13,
            ..*ch
        };
        let s = build_regime1_scheme(&m, t_len)?;
        return Ok(mirror_scheme(s, ch));
    }
    let n = ch.n().max(1) as usize;
    let p = ch.p;
    let nc = ch.n_c as i64;

    let mut b = Builder::new(ch);
    let r1 = alloc.user1;
    let r2 = alloc.user2;
    let b1 = bands_user1(ch);
    let b2 = bands_user2(ch);
    if alloc.case_tag == CaseTag::NoCoop {
        // Trivial silent program (cooperation does not pay here).
        return Ok(Scheme {
            name: "regime1",
            ch: *ch,
            t_len,
            j_blocks: t_len,
            seed_len: 0,
            groups: Vec::new(),
            x1: vec![GfMatrix::zero(n, 0, p); t_len],
            x2: vec![GfMatrix::zero(n, 0, p); t_len],
            relay3: zero_relay(n, 0, p, t_len),
            relay4: zero_relay(n, 0, p, t_len),
            schedule: Vec::new(),
            nominal_rates: (0.0, 0.0),
        });
    }
    let case_b = alloc.case_tag == CaseTag::B;

    // Symbol groups. The cooperative private stream drops its leading
    // symbols in the early blocks (boundary warm-up padding).
    for t in 1..=t_len {
        let pad1 = s_prefix_pad(t, b1.shift, nc, r1.r_s as i64);
        b.group("u1", t, 1, r1.r_u as usize, b1.u_level);
        b.group(
            "s1",
            t,
            1,
            (r1.r_s as i64 - pad1) as usize,
            b1.s_level + pad1 as usize,
        );
        b.group("zu1", t, 1, r1.r_z_up as usize, b1.zu_level);
        b.group("zd1", t, 1, r1.r_z_dn as usize, b1.zd_level);
        b.group("u2", t, 2, r2.r_u as usize, b2.u_level);
        if case_b {
            // User 2 sends only the public and lagged-private streams; the
            // lagged band sits just below the cross link's reach.
            b.group("zd2", t, 2, r2.r_z_dn as usize, ch.n23 as usize + 1);
        } else {
            let pad2 = s_prefix_pad(t, b2.shift, nc, r2.r_s as i64);
            b.group(
                "s2",
                t,
                2,
                (r2.r_s as i64 - pad2) as usize,
                b2.s_level + pad2 as usize,
            );
            b.group("zu2", t, 2, r2.r_z_up as usize, b2.zu_level);
            b.group("zd2", t, 2, r2.r_z_dn as usize, b2.zd_level);
        }
    }

    // Source maps with the anti-causal filter on the cooperative private
    // stream: x1[t] = u1[t] + sum_i A1^i s1[t+i] + z↑1[t] + z↓1[t].
    let filter_sum = |b: &Builder, stream: &str, t: usize, shift: i64| -> GfMatrix {
        let mut acc = GfMatrix::zero(n, b.seed_len, p);
        let mut i = 0usize;
        while t + i <= t_len && (i as i64) * shift < n as i64 {
            acc = acc.add(&shift_matrix(n, i as i64 * shift, p).mul(&b.map_of(stream, t + i)));
            i += 1;
        }
        acc
    };
    let (mut x1, mut x2) = (Vec::new(), Vec::new());
    for t in 1..=t_len {
        x1.push(
            b.map_of("u1", t)
                .add(&filter_sum(&b, "s1", t, b1.shift))
                .add(&b.map_of("zu1", t))
                .add(&b.map_of("zd1", t)),
        );
        let x2t = if case_b {
            b.map_of("u2", t).add(&b.map_of("zd2", t))
        } else {
            b.map_of("u2", t)
                .add(&filter_sum(&b, "s2", t, b2.shift))
                .add(&b.map_of("zu2", t))
                .add(&b.map_of("zd2", t))
        };
        x2.push(x2t);
    }

    // Relay programs: X3[t+1] = A3 (Y3[t] - G13(decoded phase-1 signals at t)
    //                                 - GC A4 G14(known user-1 parts at t-1)).
    let nn = ch.n() as i64;
    let a3 = shift_matrix(n, -(nn - ch.n23 as i64), p).neg();
    let a4 = shift_matrix(n, -(nn - ch.n14 as i64), p).neg();
    let g13 = shift_matrix(n, nn - ch.n13 as i64, p);
    let g23 = shift_matrix(n, nn - ch.n23 as i64, p);
    let g14 = shift_matrix(n, nn - ch.n14 as i64, p);
    let g24 = shift_matrix(n, nn - ch.n24 as i64, p);
    let gc = shift_matrix(n, nn - ch.n_c as i64, p);
    let mut relay3 = Relay {
        filter: a3.clone(),
        corr: vec![GfMatrix::zero(n, b.seed_len, p); t_len],
    };
    let mut relay4 = if case_b {
        zero_relay(n, b.seed_len, p, t_len)
    } else {
        Relay {
            filter: a4.clone(),
            corr: vec![GfMatrix::zero(n, b.seed_len, p); t_len],
        }
    };
    for t in 1..t_len {
        // Correction feeding X[t+1] (stored at index t), built from block t
        // and block t-1 placements.
        let phase1_3 = b
            .map_of("u1", t)
            .add(&b.map_of("s1", t))
            .add(&b.map_of("zu1", t));
        let mut sub3 = g13.mul(&phase1_3);
        if !case_b && t >= 2 {
            let echo = b.map_of("u1", t - 1).add(&b.map_of("zu1", t - 1));
            sub3 = sub3.add(&gc.mul(&a4.mul(&g14.mul(&echo))));
        }
        relay3.corr[t] = a3.mul(&sub3).neg();
        if !case_b {
            let phase1_4 = b
                .map_of("u2", t)
                .add(&b.map_of("s2", t))
                .add(&b.map_of("zu2", t));
            let mut sub4 = g24.mul(&phase1_4);
            if t >= 2 {
                let echo = b.map_of("u2", t - 1).add(&b.map_of("zu2", t - 1));
                sub4 = sub4.add(&gc.mul(&a3.mul(&g23.mul(&echo))));
            }
            relay4.corr[t] = a4.mul(&sub4).neg();
        }
    }

    // Decode schedule: phase 1 per block at each destination; phase 2 (the
    // other user's public stream, then the lagged private stream) at the end
    // of transmission.
    let mut schedule = Vec::new();
    for t in 1..=t_len {
        for stream in ["u1", "s1", "zu1"] {
            if let Some(g) = b.lookup(stream, t) {
                schedule.push(DecodeStep { dest: 3, time: t, group: g });
            }
        }
        if !case_b {
            for stream in ["u2", "s2", "zu2"] {
                if let Some(g) = b.lookup(stream, t) {
                    schedule.push(DecodeStep { dest: 4, time: t, group: g });
                }
            }
        }
    }
    for t in 1..=t_len {
        for stream in ["u2", "zd1"] {
            if let Some(g) = b.lookup(stream, t) {
                schedule.push(DecodeStep { dest: 3, time: t_len, group: g });
            }
        }
        for stream in ["u1", "zd2"] {
            if let Some(g) = b.lookup(stream, t) {
                schedule.push(DecodeStep { dest: 4, time: t_len, group: g });
            }
        }
        if !case_b {
            // Destination 4's lagged decode also needs user 1's public echo
            // resolved, which phase 2 covers via the u1 steps above.
        }
    }
    schedule.sort_by_key(|s| s.time);
    Ok(Scheme {
        name: "regime1",
        ch: *ch,
        t_len,
        j_blocks: t_len,
        seed_len: b.seed_len,
        groups: b.groups,
        x1,
        x2,
        relay3,
        relay4,
        schedule,
        nominal_rates: (r1.total(), r2.total()),
    })
}

/// Swap the user/destination roles of a scheme built for the mirrored
/// channel back onto the original channel.
fn mirror_scheme(s: Scheme, ch: &LdChannel) -> Scheme {
    let swap_label = |label: String| -> String {
        // Stream names carry the user index: u1 <-> u2, s1 <-> s2, etc.
        let (stream, rest) = label.split_once('[').unwrap_or((label.as_str(), ""));
        let swapped: String = stream
            .chars()
            .map(|c| match c {
                '1' => '2',
                '2' => '1',
                other => other,
            })
            .collect();
        if rest.is_empty() {
            swapped
        } else {
            format!("{swapped}[{rest}")
        }
    };
    let groups = s
        .groups
        .into_iter()
        .map(|g| Group {
            user: 3 - g.user,
            label: swap_label(g.label),
            ..g
        })
        .collect();
    let schedule = s
        .schedule
        .into_iter()
        .map(|d| DecodeStep {
            dest: 7 - d.dest,
            ..d
        })
        .collect();
    Scheme {
        ch: *ch,
        groups,
        schedule,
        x1: s.x2,
        x2: s.x1,
        relay3: s.relay4,
        relay4: s.relay3,
        nominal_rates: (s.nominal_rates.1, s.nominal_rates.0),
        ..s
    }
}

/// Zero out all message symbols except those of the named streams; used by
/// nulling and superposition checks.
pub fn mask_messages(scheme: &Scheme, messages: &[u64], keep: &[&str]) -> Vec<u64> {
    let mut out = vec![0u64; messages.len()];
    for g in &scheme.groups {
        let stream = g.label.split('[').next().unwrap_or("");
        if keep.contains(&stream) {
            out[g.start..g.start + g.len]
                .copy_from_slice(&messages[g.start..g.start + g.len]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_messages(len: usize, p: u64, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.gen_range(0..p)).collect()
    }

    #[test]
    fn example1_succeeds_with_rates_4_4() {
        let ch = LdChannel::new(5, 2, 2, 5, 1);
        let scheme = build_example1_scheme(&ch, 20).unwrap();
        let compiled = compile_scheme(&scheme);
        assert!(compiled.all_determined());
        for seed in 0..10 {
            let msgs = random_messages(scheme.seed_len, 2, seed);
            let report = compiled.run(&msgs, false);
            assert!(report.success, "failed: {:?}", report.failed_step);
            assert_eq!(report.achieved_rates, (4.0, 4.0));
        }
    }

    #[test]
    fn example1_received_signal_matches_display() {
        // y3[1] with all-ones messages: levels (u1, s1, z↑1, s1[2]+u2, z↓1)
        // = (1, 0, 1, 1+1, 1) over GF(2), with s1[1] = 0 by boundary.
        let ch = LdChannel::new(5, 2, 2, 5, 1);
        let scheme = build_example1_scheme(&ch, 3).unwrap();
        let compiled = compile_scheme(&scheme);
        let msgs = vec![1u64; scheme.seed_len];
        let y3_1 = compiled.y3[0].mul_vec(&msgs);
        assert_eq!(y3_1, vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn example1_relay_is_negated_upshifted_residual() {
        // Over GF(3) the sign matters: x3[t+1] level 1 must equal
        // -(s1[t+1] + u2[t]).
        let mut ch = LdChannel::new(5, 2, 2, 5, 1);
        ch.p = 3;
        let scheme = build_example1_scheme(&ch, 4).unwrap();
        let compiled = compile_scheme(&scheme);
        let mut msgs = vec![0u64; scheme.seed_len];
        // Set s1[2] = 1 and u2[1] = 1; x3[2] level 1 should be -(1+1) = 1 mod 3.
        for g in &scheme.groups {
            if g.label == "s1[2]" || g.label == "u2[1]" {
                msgs[g.start] = 1;
            }
        }
        let x3_2 = compiled.x3[1].mul_vec(&msgs);
        assert_eq!(x3_2[0], 1);
    }

    #[test]
    fn example1_wrong_channel_rejected() {
        let err = build_example1_scheme(&LdChannel::new(4, 2, 2, 4, 1), 5);
        assert!(matches!(err, Err(BuildError::WrongChannel(_, _))));
    }

    #[test]
    fn example2_succeeds_with_rates_2_2() {
        let ch = LdChannel::new(2, 1, 1, 2, 3);
        let scheme = build_example2_scheme(&ch, 12).unwrap();
        let compiled = compile_scheme(&scheme);
        assert!(compiled.all_determined());
        let msgs = random_messages(scheme.seed_len, 2, 9);
        let report = compiled.run(&msgs, false);
        assert!(report.success);
        assert_eq!(report.achieved_rates, (2.0, 2.0));
        // Received structure: y3[t] = (u2[t-1]; u1[t]; z1[t]+u2[t]).
        let y3_2 = compiled.y3[1].mul_vec(&msgs);
        let val = |label: &str| {
            scheme
                .groups
                .iter()
                .find(|g| g.label == label)
                .map(|g| msgs[g.start])
                .unwrap_or(0)
        };
        assert_eq!(
            y3_2,
            vec![val("u2[1]"), val("u1[2]"), (val("z1[2]") + val("u2[2]")) % 2]
        );
    }

    #[test]
    fn example2_single_block_degenerate() {
        let ch = LdChannel::new(2, 1, 1, 2, 3);
        let scheme = build_example2_scheme(&ch, 2).unwrap();
        let report = run_ld_network(&scheme, &random_messages(scheme.seed_len, 2, 1), false);
        assert!(report.success);
    }

    #[test]
    fn regime1_reproduces_example1_rates() {
        let ch = LdChannel::new(5, 2, 2, 5, 1);
        let scheme = build_regime1_scheme(&ch, 20).unwrap();
        let compiled = compile_scheme(&scheme);
        assert!(compiled.all_determined());
        let report = compiled.run(&random_messages(scheme.seed_len, 2, 3), false);
        assert!(report.success, "failed: {:?}", report.failed_step);
        assert_eq!(report.achieved_rates, (4.0, 4.0));
    }

    #[test]
    fn regime1_case_b_destination4_silent() {
        let ch = LdChannel::new(6, 2, 2, 3, 1);
        let scheme = build_regime1_scheme(&ch, 16).unwrap();
        let compiled = compile_scheme(&scheme);
        assert!(
            compiled.all_determined(),
            "undetermined step in case (b) run"
        );
        let msgs = random_messages(scheme.seed_len, 2, 5);
        let report = compiled.run(&msgs, false);
        assert!(report.success, "failed: {:?}", report.failed_step);
        assert_eq!(
            report.achieved_rates.0 + report.achieved_rates.1,
            7.0,
            "case (b) sum"
        );
        for t in 0..scheme.t_len {
            assert!(compiled.x4[t].is_zero(), "destination 4 must stay silent");
        }
    }

    #[test]
    fn regime1_nocoop_trivial() {
        let ch = LdChannel::new(3, 3, 3, 3, 0);
        let scheme = build_regime1_scheme(&ch, 5).unwrap();
        let report = run_ld_network(&scheme, &[], false);
        assert!(report.success);
        assert_eq!(report.achieved_rates, (0.0, 0.0));
    }

    #[test]
    fn s2_nulling_case_a() {
        // With only the cooperative private stream of user 2 active, Y3 must
        // be identically zero at every t (and symmetrically for user 1 / Y4).
        for ch in [
            LdChannel::new(5, 2, 2, 5, 1),
            LdChannel::new(5, 2, 2, 5, 2),
            LdChannel::new(4, 2, 2, 4, 2),
            LdChannel::new(5, 3, 3, 5, 3),
            LdChannel::new(6, 2, 3, 5, 2),
        ] {
            assert_eq!(regime1_ld_rates(&ch).unwrap().case_tag, CaseTag::A);
            let scheme = build_regime1_scheme(&ch, 10).unwrap();
            let compiled = compile_scheme(&scheme);
            let ones = vec![1u64; scheme.seed_len];
            let only_s2 = mask_messages(&scheme, &ones, &["s2"]);
            let only_s1 = mask_messages(&scheme, &ones, &["s1"]);
            for t in 0..scheme.t_len {
                assert!(
                    compiled.y3[t].mul_vec(&only_s2).iter().all(|&v| v == 0),
                    "S2 leaked into Y3 at t={} on {ch:?}",
                    t + 1
                );
                assert!(
                    compiled.y4[t].mul_vec(&only_s1).iter().all(|&v| v == 0),
                    "S1 leaked into Y4 at t={} on {ch:?}",
                    t + 1
                );
            }
        }
    }

    #[test]
    fn linearity_and_superposition() {
        let ch = LdChannel::new(5, 2, 2, 5, 1);
        let scheme = build_regime1_scheme(&ch, 8).unwrap();
        let compiled = compile_scheme(&scheme);
        let a = random_messages(scheme.seed_len, 2, 11);
        let b = random_messages(scheme.seed_len, 2, 12);
        let sum: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + y) % 2).collect();
        let ta = compiled.run(&a, true).trace.unwrap();
        let tb = compiled.run(&b, true).trace.unwrap();
        let ts = compiled.run(&sum, true).trace.unwrap();
        for ((ra, rb), rs) in ta.iter().zip(&tb).zip(&ts) {
            assert_eq!((ra.value + rb.value) % 2, rs.value);
        }
        // All-zero messages give the all-zero trace.
        let t0 = compiled.run(&vec![0; scheme.seed_len], true).trace.unwrap();
        assert!(t0.iter().all(|r| r.value == 0));
    }

    #[test]
    fn decode_soundness_over_many_seeds() {
        let ch = LdChannel::new(5, 2, 2, 5, 1);
        let scheme = build_regime1_scheme(&ch, 10).unwrap();
        let compiled = compile_scheme(&scheme);
        for seed in 0..100 {
            let msgs = random_messages(scheme.seed_len, 2, seed);
            let report = compiled.run(&msgs, false);
            assert!(report.success);
            for outcome in &report.decoded {
                let g = scheme
                    .groups
                    .iter()
                    .find(|g| g.label == outcome.label)
                    .unwrap();
                assert_eq!(outcome.values, msgs[g.start..g.start + g.len].to_vec());
            }
        }
    }

    #[test]
    fn regime1_random_case_a_channels_succeed() {
        // Random regime-(i) case-(a) channels: the scheme must decode and
        // realize its per-user stream ceilings.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut tested = 0;
        while tested < 12 {
            let n13 = rng.gen_range(1..7u32);
            let n23 = rng.gen_range(0..6u32);
            let n14 = rng.gen_range(0..6u32);
            let n24 = rng.gen_range(1..7u32);
            let ch = LdChannel::new(n13, n23, n14, n24, 0);
            let nmin = ch.n_min();
            if nmin == 0 {
                continue;
            }
            let ch = ch.with_nc(rng.gen_range(1..=nmin));
            let alloc = regime1_ld_rates(&ch).unwrap();
            if alloc.case_tag != CaseTag::A {
                continue;
            }
            tested += 1;
            let scheme = build_regime1_scheme(&ch, 10).unwrap();
            let compiled = compile_scheme(&scheme);
            assert!(
                compiled.all_determined(),
                "undetermined decode on {ch:?}"
            );
            let report = compiled.run(&random_messages(scheme.seed_len, 2, 7), false);
            assert!(report.success, "{ch:?}: {:?}", report.failed_step);
            assert_eq!(report.achieved_rates.0, alloc.user1.total());
            assert_eq!(report.achieved_rates.1, alloc.user2.total());
        }
    }
}
