//! Executable platform components: frequency-scaled initiators, routers and
//! targets bound over virtual buses.

mod model;
mod spec;
mod storage;
mod timing;

pub use model::{Endpoint, Model, SimulationResult};
pub use spec::{
    Address, AddressRange, Binding, BusSpec, CpuSpec, HexBytes, InitiatorSpec, Instance, ModuleSpec, RouterSpec,
    SocketRef, StorageSpec, TargetSpec, TransactionTemplate,
};
pub use storage::{SharedStorage, Storage};
pub use timing::{effective_delay, transfer_time, Bandwidth, Frequency};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("E-NO-ROUTE: router in-socket {0} has no connections")]
    Unconnected(usize),
    #[error("E-NO-ROUTE: address {0:#x} matches no decode range")]
    NoRoute(u64),
}

/// Out-sockets a router forwards a transaction on `in_socket` to, in
/// ascending order. With an address map only the connected out whose range
/// holds `address` is chosen; without one the transaction goes to every
/// connected out.
pub fn route(router: &RouterSpec, in_socket: usize, address: u64) -> Result<Vec<usize>, RouteError> {
    let outs =
        router.connections.get(&in_socket).filter(|outs| !outs.is_empty()).ok_or(RouteError::Unconnected(in_socket))?;
    let mut chosen: Vec<usize> = match &router.address_map {
        None => outs.clone(),
        Some(map) => {
            outs.iter().copied().filter(|out| map.get(out).is_some_and(|range| range.contains(address))).collect()
        }
    };
    chosen.sort_unstable();
    chosen.dedup();
    if chosen.is_empty() {
        return Err(RouteError::NoRoute(address));
    }
    Ok(chosen)
}
