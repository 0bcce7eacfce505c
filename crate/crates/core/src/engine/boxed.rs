//! Type erasure for protocols, so heterogeneous protocols can share a registry
//! and be wrapped by transforms at runtime.

use std::any::Any;
use std::sync::Arc;

use dyn_clone::DynClone;

use super::{Inbox, NodeView, Outbox, Protocol, RoundCtx, StateCodecError};

pub trait DynState: DynClone + Any + Send + Sync {
    fn as_any(&self) -> &dyn Any;
    fn as_any_mut(&mut self) -> &mut dyn Any;
}

impl<T: Clone + Any + Send + Sync> DynState for T {
    fn as_any(&self) -> &dyn Any {
        self
    }
    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }
}

dyn_clone::clone_trait_object!(DynState);

#[derive(Clone)]
pub struct BoxedState(Box<dyn DynState>);

impl BoxedState {
    fn get<T: 'static>(&self) -> &T {
        (*self.0).as_any().downcast_ref().expect("state belongs to a different protocol")
    }
    fn get_mut<T: 'static>(&mut self) -> &mut T {
        (*self.0).as_any_mut().downcast_mut().expect("state belongs to a different protocol")
    }
}

trait ErasedProtocol: Send + Sync {
    fn init(&self, view: &NodeView) -> BoxedState;
    fn send(&self, state: &BoxedState, ctx: RoundCtx) -> Outbox;
    fn receive(&self, state: &mut BoxedState, ctx: RoundCtx, inbox: &Inbox);
    fn decide(&self, state: &BoxedState) -> bool;
    fn encode_state(&self, state: &BoxedState) -> Vec<u8>;
    fn decode_state(&self, bytes: &[u8]) -> Result<BoxedState, StateCodecError>;
}

impl<P: Protocol> ErasedProtocol for P {
    fn init(&self, view: &NodeView) -> BoxedState {
        BoxedState(Box::new(Protocol::init(self, view)))
    }
    fn send(&self, state: &BoxedState, ctx: RoundCtx) -> Outbox {
        Protocol::send(self, state.get::<P::State>(), ctx)
    }
    fn receive(&self, state: &mut BoxedState, ctx: RoundCtx, inbox: &Inbox) {
        Protocol::receive(self, state.get_mut::<P::State>(), ctx, inbox)
    }
    fn decide(&self, state: &BoxedState) -> bool {
        Protocol::decide(self, state.get::<P::State>())
    }
    fn encode_state(&self, state: &BoxedState) -> Vec<u8> {
        Protocol::encode_state(self, state.get::<P::State>())
    }
    fn decode_state(&self, bytes: &[u8]) -> Result<BoxedState, StateCodecError> {
        Protocol::decode_state(self, bytes).map(|s| BoxedState(Box::new(s)))
    }
}

/// A protocol behind a shared pointer with an opaque state type.
#[derive(Clone)]
pub struct BoxedProtocol(Arc<dyn ErasedProtocol>);

impl BoxedProtocol {
    pub fn new<P: Protocol + 'static>(p: P) -> Self {
        Self(Arc::new(p))
    }
}

impl Protocol for BoxedProtocol {
    type State = BoxedState;

    fn init(&self, view: &NodeView) -> BoxedState {
        self.0.init(view)
    }
    fn send(&self, state: &BoxedState, ctx: RoundCtx) -> Outbox {
        self.0.send(state, ctx)
    }
    fn receive(&self, state: &mut BoxedState, ctx: RoundCtx, inbox: &Inbox) {
        self.0.receive(state, ctx, inbox)
    }
    fn decide(&self, state: &BoxedState) -> bool {
        self.0.decide(state)
    }
    fn encode_state(&self, state: &BoxedState) -> Vec<u8> {
        self.0.encode_state(state)
    }
    fn decode_state(&self, bytes: &[u8]) -> Result<BoxedState, StateCodecError> {
        self.0.decode_state(bytes)
    }
}
