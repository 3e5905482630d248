//! The elaborated platform and its simulation.
//!
//! Every initiator instance runs as one kernel activity. Routers and
//! targets never suspend: blocking transport through them only annotates
//! the caller's local time, and fan-out to N destinations completes at the
//! latest destination (max-join). Co-resident instances on one CPU do not
//! contend for cycles.

use std::cell::{Cell, RefCell};
use std::rc::Rc;

use super::spec::{InitiatorSpec, ModuleSpec, RouterSpec, TargetSpec, TransactionTemplate};
use super::storage::{SharedStorage, Storage};
use super::timing::{effective_delay, transfer_time};
use super::{route, RouteError};
use crate::kernel::{KernelError, QuantumKeeper, Scheduler};
use crate::payload::{deep_copy_payload, Command, GenericPayload, ResponseStatus};
use crate::sysdesc::{ElaborationError, SystemDescription};
use crate::time::{SimTime, TimeOverflow};
use crate::trace::{sort_records, TraceRecord};
use crate::transport::{DmiAccess, DmiDescriptor};

/// An in-socket of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub instance: usize,
    pub socket: usize,
}

enum Role {
    Initiator { spec: InitiatorSpec, delay: SimTime },
    Router { spec: RouterSpec, delay: SimTime },
    Target { spec: TargetSpec, socket_delays: Vec<SimTime>, storage: SharedStorage },
}

struct Node {
    name: String,
    role: Role,
    bandwidth: Option<super::Bandwidth>,
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationResult {
    /// Kernel time when the last event was dispatched.
    pub end_time: SimTime,
    /// Records in log order.
    pub trace: Vec<TraceRecord>,
    /// Final contents of every target's storage, in instance order.
    pub memories: Vec<(String, Storage)>,
}

impl SimulationResult {
    pub fn memory(&self, instance: &str) -> Option<&Storage> {
        self.memories.iter().find(|(name, _)| name == instance).map(|(_, m)| m)
    }
}

/// Where an in-flight transaction currently is.
#[derive(Debug, Clone, Copy)]
struct TxnContext {
    now: SimTime,
    txn_id: u64,
}

pub struct Model {
    nodes: Vec<Node>,
    /// `fanout[instance][out_socket]` lists bound in-sockets in binding order.
    fanout: Vec<Vec<Vec<Endpoint>>>,
    global_quantum: SimTime,
    event_limit: u64,
    records: RefCell<Vec<TraceRecord>>,
    activations: RefCell<Vec<u64>>,
    next_txn: Cell<u64>,
    fault: RefCell<Option<TimeOverflow>>,
}

impl Model {
    /// Builds the model from a description that already passed validation.
    pub(crate) fn from_description(desc: &SystemDescription) -> Result<Model, ElaborationError> {
        let index_of = |name: &str| desc.instances.iter().position(|i| i.name == name);
        let mut nodes = Vec::with_capacity(desc.instances.len());
        let mut fanout = Vec::with_capacity(desc.instances.len());
        for inst in &desc.instances {
            let module = desc.module(&inst.module).expect("validated module reference");
            let cpu = desc.cpu(&inst.cpu).expect("validated cpu reference").frequency;
            let scale = |d: SimTime| effective_delay(d, cpu).map_err(|_| ElaborationError::Overflow(inst.name.clone()));
            let role = match module {
                ModuleSpec::Initiator(spec) => Role::Initiator { delay: scale(spec.delay)?, spec: spec.clone() },
                ModuleSpec::Router(spec) => Role::Router { delay: scale(spec.delay)?, spec: spec.clone() },
                ModuleSpec::Target(spec) => Role::Target {
                    socket_delays: spec.socket_delays.iter().map(|&d| scale(d)).collect::<Result<_, _>>()?,
                    storage: Rc::new(RefCell::new(Storage::new(
                        spec.storage.base.0,
                        spec.storage.size,
                        spec.storage.fill,
                    ))),
                    spec: spec.clone(),
                },
            };
            nodes.push(Node { name: inst.name.clone(), role, bandwidth: module.bandwidth() });
            fanout.push(vec![Vec::new(); module.out_socket_count()]);
        }
        for b in &desc.bindings {
            let from = index_of(&b.from.instance).expect("validated binding");
            let to = index_of(&b.to.instance).expect("validated binding");
            fanout[from][b.from.socket].push(Endpoint { instance: to, socket: b.to.socket });
        }
        let count = nodes.len();
        Ok(Model {
            nodes,
            fanout,
            global_quantum: desc.options.global_quantum,
            event_limit: desc.options.event_limit,
            records: RefCell::new(Vec::new()),
            activations: RefCell::new(vec![0; count]),
            next_txn: Cell::new(0),
            fault: RefCell::new(None),
        })
    }

    pub fn set_global_quantum(&mut self, quantum: SimTime) {
        self.global_quantum = quantum;
    }

    pub fn set_event_limit(&mut self, limit: u64) {
        self.event_limit = limit;
    }

    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// In-sockets bound to `instance`'s out-socket `socket`.
    pub fn destinations(&self, instance: usize, socket: usize) -> &[Endpoint] {
        self.fanout.get(instance).and_then(|outs| outs.get(socket)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Storage of a target instance.
    pub fn storage(&self, instance: usize) -> Option<SharedStorage> {
        match &self.nodes.get(instance)?.role {
            Role::Target { storage, .. } => Some(Rc::clone(storage)),
            _ => None,
        }
    }

    /// Runs every initiator's workload to completion.
    pub fn simulate(self) -> Result<SimulationResult, KernelError> {
        let model = Rc::new(self);
        let sched = Scheduler::new().with_event_limit(model.event_limit);
        for (index, node) in model.nodes.iter().enumerate() {
            if matches!(node.role, Role::Initiator { .. }) {
                sched.spawn(run_initiator(Rc::clone(&model), sched.clone(), index));
            }
        }
        let end_time = sched.run()?;
        if let Some(overflow) = model.fault.borrow_mut().take() {
            return Err(overflow.into());
        }
        let mut trace = model.records.take();
        sort_records(&mut trace);
        let memories = model
            .nodes
            .iter()
            .filter_map(|n| match &n.role {
                Role::Target { storage, .. } => Some((n.name.clone(), storage.borrow().clone())),
                _ => None,
            })
            .collect();
        Ok(SimulationResult { end_time, trace, memories })
    }

    fn record(&self, instance: usize, start: SimTime, end: SimTime, txn_id: u64, status: ResponseStatus) {
        let activation = {
            let mut counts = self.activations.borrow_mut();
            let n = counts[instance];
            counts[instance] += 1;
            n
        };
        self.records.borrow_mut().push(TraceRecord {
            instance: self.nodes[instance].name.clone(),
            activation,
            start,
            end,
            txn_id,
            status,
        });
    }

    /// Blocking transport into `dest`. `t` is the caller's local-time
    /// annotation relative to kernel time `now`; on return it includes the
    /// callee's service latency.
    pub fn b_transport(
        &self,
        dest: Endpoint,
        p: &mut GenericPayload,
        t: &mut SimTime,
        now: SimTime,
    ) -> Result<(), TimeOverflow> {
        let txn_id = self.next_txn.get();
        self.next_txn.set(txn_id + 1);
        self.transport(dest, p, t, TxnContext { now, txn_id })
    }

    fn transport(
        &self,
        dest: Endpoint,
        p: &mut GenericPayload,
        t: &mut SimTime,
        ctx: TxnContext,
    ) -> Result<(), TimeOverflow> {
        match &self.nodes[dest.instance].role {
            Role::Target { .. } => self.target_serve(dest, p, t, ctx),
            Role::Router { .. } => self.router_forward(dest, p, t, ctx),
            Role::Initiator { .. } => {
                p.response_status = ResponseStatus::GenericError;
                Ok(())
            }
        }
    }

    fn target_serve(
        &self,
        dest: Endpoint,
        p: &mut GenericPayload,
        t: &mut SimTime,
        ctx: TxnContext,
    ) -> Result<(), TimeOverflow> {
        let node = &self.nodes[dest.instance];
        let Role::Target { spec, socket_delays, storage } = &node.role else {
            unreachable!("target_serve on a non-target");
        };
        let start = ctx.now.checked_add(*t)?;
        let latency = socket_delays[dest.socket].checked_add(transfer_time(p.data_length, node.bandwidth)?)?;
        *t = t.checked_add(latency)?;
        p.response_status = match p.defect_status() {
            Some(status) => status,
            None => storage.borrow_mut().execute(p),
        };
        p.dmi_allowed = spec.dmi;
        self.record(dest.instance, start, ctx.now.checked_add(*t)?, ctx.txn_id, p.response_status);
        Ok(())
    }

    fn router_forward(
        &self,
        dest: Endpoint,
        p: &mut GenericPayload,
        t: &mut SimTime,
        ctx: TxnContext,
    ) -> Result<(), TimeOverflow> {
        let node = &self.nodes[dest.instance];
        let Role::Router { spec, delay } = &node.role else {
            unreachable!("router_forward on a non-router");
        };
        let start = ctx.now.checked_add(*t)?;
        *t = t.checked_add(delay.checked_add(transfer_time(p.data_length, node.bandwidth)?)?)?;
        let forwarded = ctx.now.checked_add(*t)?;
        let targets: Vec<Endpoint> = match route(spec, dest.socket, p.address) {
            Ok(outs) => {
                outs.into_iter().flat_map(|out| self.destinations(dest.instance, out).iter().copied()).collect()
            }
            Err(RouteError::Unconnected(_) | RouteError::NoRoute(_)) => Vec::new(),
        };
        if targets.is_empty() {
            p.response_status = ResponseStatus::AddressError;
            self.record(dest.instance, start, forwarded, ctx.txn_id, p.response_status);
            return Ok(());
        }
        self.fan_out(&targets, p, t, ctx)?;
        self.record(dest.instance, start, forwarded, ctx.txn_id, p.response_status);
        Ok(())
    }

    /// Sends `p` to every destination concurrently. A single destination
    /// receives `p` itself; several receive independent copies, the
    /// annotation becomes the latest completion, and the status is OK only
    /// if every copy succeeded (else the first failure in destination
    /// order).
    fn fan_out(
        &self,
        targets: &[Endpoint],
        p: &mut GenericPayload,
        t: &mut SimTime,
        ctx: TxnContext,
    ) -> Result<(), TimeOverflow> {
        if let [only] = targets {
            return self.transport(*only, p, t, ctx);
        }
        let issued_at = *t;
        let mut latest = issued_at;
        let mut failure = None;
        let mut read_back = None;
        for &target in targets {
            let mut copy = deep_copy_payload(p);
            let mut local = issued_at;
            self.transport(target, &mut copy, &mut local, ctx)?;
            latest = latest.max(local);
            if failure.is_none() && !copy.response_status.is_ok() {
                failure = Some(copy.response_status);
            }
            if p.command == Command::Read && read_back.is_none() {
                read_back = Some(copy.data);
            }
        }
        *t = latest;
        p.response_status = failure.unwrap_or(ResponseStatus::Ok);
        if let Some(data) = read_back {
            p.data = data;
        }
        Ok(())
    }

    /// Requests direct memory access at `address` through `dest`.
    ///
    /// Targets grant their whole storage with their scaled socket-0 delay
    /// as the per-access latency. Routers pass the request to the single
    /// destination the address decodes to, add their own scaled delay, and
    /// narrow the range to their decode window.
    pub fn get_dmi(&self, dest: Endpoint, address: u64) -> DmiDescriptor {
        match &self.nodes[dest.instance].role {
            Role::Target { spec, socket_delays, storage } => {
                let mem = storage.borrow();
                if !spec.dmi || !mem.contains(address) {
                    return DmiDescriptor::denied(mem.base(), mem.last_address());
                }
                DmiDescriptor {
                    granted: true,
                    start_address: mem.base(),
                    end_address: mem.last_address(),
                    access: DmiAccess::ReadWrite,
                    read_latency: socket_delays[0],
                    write_latency: socket_delays[0],
                    storage: Some(Rc::clone(storage)),
                }
            }
            Role::Router { spec, delay } => {
                let Ok(outs) = route(spec, dest.socket, address) else {
                    return DmiDescriptor::denied_everywhere();
                };
                let targets: Vec<Endpoint> =
                    outs.iter().flat_map(|&out| self.destinations(dest.instance, out).iter().copied()).collect();
                let [only] = targets.as_slice() else {
                    return DmiDescriptor::denied_everywhere();
                };
                let mut grant = self.get_dmi(*only, address);
                if let Some(window) = spec.address_map.as_ref().and_then(|m| m.get(&outs[0])) {
                    grant.start_address = grant.start_address.max(window.base.0);
                    grant.end_address = grant.end_address.min(window.limit.0.saturating_sub(1));
                }
                if grant.granted {
                    grant.read_latency = grant.read_latency.checked_add(*delay).unwrap_or(SimTime::MAX);
                    grant.write_latency = grant.write_latency.checked_add(*delay).unwrap_or(SimTime::MAX);
                }
                grant
            }
            Role::Initiator { .. } => DmiDescriptor::denied_everywhere(),
        }
    }

    /// Timeless access through `dest`. Reads use the first destination a
    /// router decodes to; writes reach every destination. Returns the byte
    /// count transferred at the first destination.
    pub fn transport_dbg(&self, dest: Endpoint, p: &mut GenericPayload) -> usize {
        match &self.nodes[dest.instance].role {
            Role::Target { storage, .. } => storage.borrow_mut().debug_transfer(p),
            Role::Router { spec, .. } => {
                let Ok(outs) = route(spec, dest.socket, p.address) else {
                    return 0;
                };
                let targets: Vec<Endpoint> =
                    outs.iter().flat_map(|&out| self.destinations(dest.instance, out).iter().copied()).collect();
                self.dbg_fan_out(&targets, p)
            }
            Role::Initiator { .. } => 0,
        }
    }

    /// Debug access starting at an initiator's out-socket.
    pub fn initiator_dbg(&self, instance: usize, socket: usize, p: &mut GenericPayload) -> usize {
        let targets = self.destinations(instance, socket).to_vec();
        self.dbg_fan_out(&targets, p)
    }

    fn dbg_fan_out(&self, targets: &[Endpoint], p: &mut GenericPayload) -> usize {
        let Some((&first, rest)) = targets.split_first() else {
            return 0;
        };
        let count = self.transport_dbg(first, p);
        if p.command == Command::Write {
            for &target in rest {
                self.transport_dbg(target, &mut p.clone());
            }
        }
        count
    }

    fn fail(&self, err: TimeOverflow) {
        self.fault.borrow_mut().get_or_insert(err);
    }
}

/// Per-initiator cache of DMI grants.
#[derive(Default)]
struct DmiCache {
    grants: Vec<DmiDescriptor>,
}

impl DmiCache {
    /// Executes `p` directly in target memory when a grant covers it.
    fn try_access(&mut self, model: &Model, targets: &[Endpoint], p: &mut GenericPayload) -> Option<SimTime> {
        let [target] = targets else {
            return None;
        };
        if p.command == Command::Ignore || p.data_length == 0 || p.defect_status().is_some() {
            return None;
        }
        let first = p.address;
        let last = first.checked_add((p.streaming_width.min(p.data_length) - 1) as u64)?;
        let grant = match self.grants.iter().find(|g| g.covers(first, last, p.command)) {
            Some(g) => g.clone(),
            None => {
                let g = model.get_dmi(*target, first);
                if !g.covers(first, last, p.command) {
                    return None;
                }
                self.grants.push(g.clone());
                g
            }
        };
        let storage = grant.storage.as_ref()?;
        p.response_status = storage.borrow_mut().execute(p);
        Some(grant.latency(p.command))
    }
}

async fn run_initiator(model: Rc<Model>, sched: Scheduler, index: usize) {
    if let Err(err) = initiator_workload(&model, &sched, index).await {
        model.fail(err);
    }
}

async fn initiator_workload(model: &Model, sched: &Scheduler, index: usize) -> Result<(), TimeOverflow> {
    let Role::Initiator { spec, delay } = &model.nodes[index].role else {
        unreachable!("initiator activity on a non-initiator");
    };
    let bandwidth = model.nodes[index].bandwidth;
    let mut qk = QuantumKeeper::new(model.global_quantum);
    let mut dmi = DmiCache::default();
    for template in &spec.workload {
        let mut release: Option<SimTime> = None;
        for _ in 0..template.repeat {
            if let Some(at) = release {
                let local = qk.local_time(sched)?;
                if at > local {
                    qk.inc(at.saturating_sub(local))?;
                }
            }
            let start = qk.local_time(sched)?;
            release = match template.period {
                Some(period) => Some(start.checked_add(period)?),
                None => None,
            };
            issue(model, sched, &mut qk, &mut dmi, index, spec, *delay, bandwidth, template, start).await?;
        }
    }
    qk.sync(sched).await;
    Ok(())
}

/// One transaction: compute for the scaled delay, send, record.
#[allow(clippy::too_many_arguments)]
async fn issue(
    model: &Model,
    sched: &Scheduler,
    qk: &mut QuantumKeeper,
    dmi: &mut DmiCache,
    index: usize,
    spec: &InitiatorSpec,
    delay: SimTime,
    bandwidth: Option<super::Bandwidth>,
    template: &TransactionTemplate,
    start: SimTime,
) -> Result<(), TimeOverflow> {
    let mut payload = template.payload();
    qk.inc(delay.checked_add(transfer_time(payload.data_length, bandwidth)?)?)?;
    if qk.need_sync() {
        qk.sync(sched).await;
    }
    let txn_id = model.next_txn.get();
    model.next_txn.set(txn_id + 1);
    let ctx = TxnContext { now: sched.now(), txn_id };
    let targets = model.destinations(index, template.socket).to_vec();

    let mut t = qk.local_offset();
    let direct = if spec.dmi { dmi.try_access(model, &targets, &mut payload) } else { None };
    match direct {
        Some(latency) => t = t.checked_add(latency)?,
        None if targets.is_empty() => payload.response_status = ResponseStatus::AddressError,
        None => model.fan_out(&targets, &mut payload, &mut t, ctx)?,
    }
    qk.set(t);
    let end = qk.local_time(sched)?;
    model.record(index, start, end, txn_id, payload.response_status);
    if qk.need_sync() {
        qk.sync(sched).await;
    }
    Ok(())
}
