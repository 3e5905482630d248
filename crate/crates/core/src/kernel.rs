//! Deterministic discrete-event kernel.
//!
//! Activities are plain Rust futures. They may only suspend on the kernel's
//! own primitives ([`Scheduler::wait`] and awaiting a [`JoinHandle`]); any
//! other pending future parks the activity forever. Events are dispatched in
//! `(time, seq)` order where `seq` is a global insertion counter, so
//! same-time events run FIFO and every run of the same model dispatches the
//! same sequence. There are no delta cycles.

use std::cell::{Cell, RefCell};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::future::Future;
use std::pin::Pin;
use std::rc::{Rc, Weak};
use std::task::{Context, Poll, Waker};

use thiserror::Error;

use crate::time::{SimTime, TimeOverflow};

pub const DEFAULT_EVENT_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("E-EVENT-LIMIT: event limit of {limit} dispatches exceeded at {now} ps")]
    EventLimit { limit: u64, now: u64 },
    #[error("E-TIME-OVERFLOW: {0}")]
    TimeOverflow(#[from] TimeOverflow),
}

impl KernelError {
    pub fn code(&self) -> &'static str {
        match self {
            KernelError::EventLimit { .. } => "E-EVENT-LIMIT",
            KernelError::TimeOverflow(_) => "E-TIME-OVERFLOW",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskId(usize);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task{}", self.0)
    }
}

/// One entry of the optional dispatch log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dispatch {
    pub time: SimTime,
    pub seq: u64,
    pub task: TaskId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    time: SimTime,
    seq: u64,
    task: TaskId,
}

type Activity = Pin<Box<dyn Future<Output = ()>>>;

struct Kernel {
    now: Cell<SimTime>,
    seq: Cell<u64>,
    queue: RefCell<BinaryHeap<Reverse<Entry>>>,
    tasks: RefCell<Vec<Option<Activity>>>,
    current: Cell<Option<TaskId>>,
    event_limit: Cell<u64>,
    dispatched: Cell<u64>,
    fault: RefCell<Option<KernelError>>,
    log: RefCell<Option<Vec<Dispatch>>>,
}

impl Kernel {
    fn push(&self, time: SimTime, task: TaskId) -> u64 {
        let seq = self.seq.get();
        self.seq.set(seq + 1);
        self.queue.borrow_mut().push(Reverse(Entry { time, seq, task }));
        seq
    }

    fn fail(&self, err: KernelError) {
        self.fault.borrow_mut().get_or_insert(err);
    }

    fn current(&self) -> TaskId {
        self.current.get().expect("kernel primitive awaited outside of a running activity")
    }
}

/// Handle to the simulation kernel. Cloning yields another handle to the
/// same kernel.
#[derive(Clone)]
pub struct Scheduler {
    kernel: Rc<Kernel>,
}

impl Default for Scheduler {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheduler {
    pub fn new() -> Self {
        Scheduler {
            kernel: Rc::new(Kernel {
                now: Cell::new(SimTime::ZERO),
                seq: Cell::new(0),
                queue: RefCell::new(BinaryHeap::new()),
                tasks: RefCell::new(Vec::new()),
                current: Cell::new(None),
                event_limit: Cell::new(DEFAULT_EVENT_LIMIT),
                dispatched: Cell::new(0),
                fault: RefCell::new(None),
                log: RefCell::new(None),
            }),
        }
    }

    pub fn with_event_limit(self, limit: u64) -> Self {
        self.kernel.event_limit.set(limit);
        self
    }

    /// Keeps a log of every dispatch, readable via [`Scheduler::dispatches`].
    pub fn with_dispatch_log(self) -> Self {
        *self.kernel.log.borrow_mut() = Some(Vec::new());
        self
    }

    pub fn now(&self) -> SimTime {
        self.kernel.now.get()
    }

    pub fn dispatched(&self) -> u64 {
        self.kernel.dispatched.get()
    }

    pub fn dispatches(&self) -> Vec<Dispatch> {
        self.kernel.log.borrow().clone().unwrap_or_default()
    }

    /// Schedules `activity` to start at `now + delay`. Activities scheduled
    /// for the same instant start in call order.
    pub fn schedule<F>(&self, delay: SimTime, activity: F) -> Result<JoinHandle<F::Output>, KernelError>
    where
        F: Future + 'static,
        F::Output: 'static,
    {
        let start = self.now().checked_add(delay)?;
        let slot = Rc::new(JoinSlot { result: RefCell::new(None), waiter: Cell::new(None) });
        let weak: Weak<Kernel> = Rc::downgrade(&self.kernel);
        let completion = Rc::clone(&slot);
        let wrapped = async move {
            let value = activity.await;
            *completion.result.borrow_mut() = Some(value);
            if let (Some(waiter), Some(kernel)) = (completion.waiter.take(), weak.upgrade()) {
                let now = kernel.now.get();
                kernel.push(now, waiter);
            }
        };
        let task = {
            let mut tasks = self.kernel.tasks.borrow_mut();
            tasks.push(Some(Box::pin(wrapped)));
            TaskId(tasks.len() - 1)
        };
        let seq = self.kernel.push(start, task);
        Ok(JoinHandle { kernel: Rc::downgrade(&self.kernel), slot, task, seq })
    }

    /// Starts `activity` in the current timestamp, after everything already
    /// queued for it.
    pub fn spawn<F>(&self, activity: F) -> JoinHandle<F::Output>
    where
        F: Future + 'static,
        F::Output: 'static,
    {
        self.schedule(SimTime::ZERO, activity).expect("zero delay cannot overflow")
    }

    /// Suspends the calling activity for `duration` of simulated time.
    pub fn wait(&self, duration: SimTime) -> Wait {
        Wait { kernel: Rc::clone(&self.kernel), duration, deadline: None }
    }

    /// Dispatches events until the queue drains and returns the final time.
    pub fn run(&self) -> Result<SimTime, KernelError> {
        let kernel = &self.kernel;
        let waker = Waker::noop();
        let mut cx = Context::from_waker(waker);
        loop {
            if let Some(err) = kernel.fault.borrow_mut().take() {
                return Err(err);
            }
            let Some(Reverse(entry)) = kernel.queue.borrow_mut().pop() else {
                break;
            };
            let dispatched = kernel.dispatched.get() + 1;
            if dispatched > kernel.event_limit.get() {
                return Err(KernelError::EventLimit { limit: kernel.event_limit.get(), now: kernel.now.get().as_ps() });
            }
            kernel.dispatched.set(dispatched);
            debug_assert!(entry.time >= kernel.now.get());
            kernel.now.set(entry.time);
            if let Some(log) = kernel.log.borrow_mut().as_mut() {
                log.push(Dispatch { time: entry.time, seq: entry.seq, task: entry.task });
            }

            let Some(mut activity) = kernel.tasks.borrow_mut()[entry.task.0].take() else {
                continue;
            };
            kernel.current.set(Some(entry.task));
            let poll = activity.as_mut().poll(&mut cx);
            kernel.current.set(None);
            if poll.is_pending() {
                kernel.tasks.borrow_mut()[entry.task.0] = Some(activity);
            }
        }
        match kernel.fault.borrow_mut().take() {
            Some(err) => Err(err),
            None => Ok(kernel.now.get()),
        }
    }
}

/// Future returned by [`Scheduler::wait`].
pub struct Wait {
    kernel: Rc<Kernel>,
    duration: SimTime,
    deadline: Option<SimTime>,
}

impl Future for Wait {
    type Output = ();

    fn poll(mut self: Pin<&mut Self>, _cx: &mut Context<'_>) -> Poll<()> {
        match self.deadline {
            Some(deadline) if self.kernel.now.get() >= deadline => Poll::Ready(()),
            Some(_) => Poll::Pending,
            None => {
                let task = self.kernel.current();
                match self.kernel.now.get().checked_add(self.duration) {
                    Ok(deadline) => {
                        self.deadline = Some(deadline);
                        self.kernel.push(deadline, task);
                    }
                    Err(e) => {
                        // Parks the activity; run() reports the fault.
                        self.deadline = Some(SimTime::MAX);
                        self.kernel.fail(e.into());
                    }
                }
                Poll::Pending
            }
        }
    }
}

struct JoinSlot<T> {
    result: RefCell<Option<T>>,
    waiter: Cell<Option<TaskId>>,
}

/// Awaitable completion of a scheduled activity. Dropping the handle
/// detaches the activity.
pub struct JoinHandle<T> {
    kernel: Weak<Kernel>,
    slot: Rc<JoinSlot<T>>,
    task: TaskId,
    seq: u64,
}

impl<T> JoinHandle<T> {
    pub fn task(&self) -> TaskId {
        self.task
    }

    /// Insertion sequence number of the activity's start event.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn is_finished(&self) -> bool {
        self.slot.result.borrow().is_some()
    }

    /// Takes the result of a finished activity outside of the kernel.
    pub fn try_take(&self) -> Option<T> {
        self.slot.result.borrow_mut().take()
    }
}

impl<T> Future for JoinHandle<T> {
    type Output = T;

    fn poll(self: Pin<&mut Self>, _cx: &mut Context<'_>) -> Poll<T> {
        if let Some(value) = self.slot.result.borrow_mut().take() {
            return Poll::Ready(value);
        }
        if let Some(kernel) = self.kernel.upgrade() {
            self.slot.waiter.set(Some(kernel.current()));
        }
        Poll::Pending
    }
}

/// Temporal-decoupling bookkeeping for one activity: how far its local time
/// runs ahead of the kernel, and the bound after which it must synchronize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuantumKeeper {
    local_offset: SimTime,
    global_quantum: SimTime,
}

impl QuantumKeeper {
    pub fn new(global_quantum: SimTime) -> Self {
        QuantumKeeper { local_offset: SimTime::ZERO, global_quantum }
    }

    pub fn local_offset(&self) -> SimTime {
        self.local_offset
    }

    pub fn global_quantum(&self) -> SimTime {
        self.global_quantum
    }

    pub fn inc(&mut self, t: SimTime) -> Result<(), TimeOverflow> {
        self.local_offset = self.local_offset.checked_add(t)?;
        Ok(())
    }

    pub fn set(&mut self, offset: SimTime) {
        self.local_offset = offset;
    }

    pub fn need_sync(&self) -> bool {
        self.local_offset >= self.global_quantum
    }

    /// Kernel time plus the local offset.
    pub fn local_time(&self, sched: &Scheduler) -> Result<SimTime, TimeOverflow> {
        sched.now().checked_add(self.local_offset)
    }

    /// Suspends the caller for its local offset, then clears the offset.
    pub async fn sync(&mut self, sched: &Scheduler) {
        let offset = self.local_offset;
        sched.wait(offset).await;
        self.local_offset = SimTime::ZERO;
    }
}
