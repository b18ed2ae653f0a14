//! Lazy, memoizing streams.
//!
//! A [`Stream`] is a suspended sequence with exactly two primitives:
//! [`lazy`] builds a stream from a producer that is run at most once, and
//! [`front`] forces a stream, yielding a [`Front`] that is either `Nil` or
//! `Cons(head, tail)`.
//!
//! Forcing is observationally pure: the first call to `front` runs the
//! producer and caches the result, and every later call returns the same
//! front without rerunning anything. Generated lexers rely on this to rewind
//! to the last accepting position without re-reading input, and retained
//! `follow` streams can be re-lexed at any time with identical results.
//!
//! ```
//! use fungen_stream::{front, from_list, lazy, Front};
//! use std::cell::Cell;
//! use std::rc::Rc;
//!
//! let runs = Rc::new(Cell::new(0));
//! let counter = runs.clone();
//! let s = lazy(move || {
//!     counter.set(counter.get() + 1);
//!     Front::Cons(7, from_list(vec![8, 9]))
//! });
//!
//! // The producer has not run yet, and runs once no matter how often we force.
//! assert_eq!(runs.get(), 0);
//! for _ in 0..3 {
//!     match front(&s) {
//!         Front::Cons(h, _) => assert_eq!(h, 7),
//!         Front::Nil => unreachable!(),
//!     }
//! }
//! assert_eq!(runs.get(), 1);
//! assert_eq!(s.iter().collect::<Vec<_>>(), vec![7, 8, 9]);
//! ```
//!
//! # Contract
//!
//! Streams may be created on one thread and handed to another, but forcing
//! the *same* cell from two threads at once is unsupported; there is no
//! internal locking. A producer that panics poisons its cell: the failure is
//! memoized and replayed (as a panic with the same message) on every later
//! force, so a failing stream fails identically forever.

use std::cell::RefCell;
use std::fmt;
use std::mem;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::rc::Rc;

/// The forced view of a stream: empty, or a head element and the rest.
#[derive(Clone, Debug, PartialEq)]
pub enum Front<T> {
    Nil,
    Cons(T, Stream<T>),
}

enum Inner<T> {
    /// Not yet forced; holds the producer.
    Delayed(Box<dyn FnOnce() -> Front<T>>),
    /// Currently being forced (used to detect re-entrant forcing).
    Forcing,
    /// Forced successfully.
    Ready(Front<T>),
    /// The producer panicked; the message is replayed on every force.
    Failed(String),
}

/// A memoized thunk producing a [`Front`].
///
/// Cloning a stream is cheap and shares the underlying cell, so all clones
/// observe the same memoized front.
pub struct Stream<T>(Rc<RefCell<Inner<T>>>);

impl<T> Clone for Stream<T> {
    fn clone(&self) -> Self {
        Stream(Rc::clone(&self.0))
    }
}

impl<T> fmt::Debug for Stream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = match &*self.0.borrow() {
            Inner::Delayed(_) => "delayed",
            Inner::Forcing => "forcing",
            Inner::Ready(_) => "ready",
            Inner::Failed(_) => "failed",
        };
        write!(f, "Stream({state})")
    }
}

/// Identity comparison: two streams are equal when they share the same cell.
///
/// This makes `Front` comparisons meaningful: two fronts of the same stream
/// compare equal because their tails are literally the same cell.
impl<T> PartialEq for Stream<T> {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }
}

const RECURSIVE_FORCE: &str = "stream cell forced recursively";

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&'static str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "stream producer panicked".to_string()
    }
}

/// Suspends `producer` as a stream. The producer does not run until the
/// stream is first forced with [`front`], and runs at most once.
pub fn lazy<T, F>(producer: F) -> Stream<T>
where
    F: FnOnce() -> Front<T> + 'static,
{
    Stream(Rc::new(RefCell::new(Inner::Delayed(Box::new(producer)))))
}

/// Forces a stream, returning its memoized front.
///
/// The first call runs the producer; later calls return the cached front.
/// If the producer panicked, every call (including the first) panics with
/// the same message.
pub fn front<T: Clone>(s: &Stream<T>) -> Front<T> {
    let producer = {
        let mut inner = s.0.borrow_mut();
        match mem::replace(&mut *inner, Inner::Forcing) {
            Inner::Ready(f) => {
                let out = f.clone();
                *inner = Inner::Ready(f);
                return out;
            }
            Inner::Failed(msg) => {
                *inner = Inner::Failed(msg.clone());
                drop(inner);
                panic!("{}", msg);
            }
            Inner::Forcing => {
                *inner = Inner::Failed(RECURSIVE_FORCE.to_string());
                drop(inner);
                panic!("{}", RECURSIVE_FORCE);
            }
            Inner::Delayed(p) => p,
        }
    };
    match catch_unwind(AssertUnwindSafe(producer)) {
        Ok(f) => {
            let out = f.clone();
            *s.0.borrow_mut() = Inner::Ready(f);
            out
        }
        Err(payload) => {
            let msg = panic_message(payload);
            *s.0.borrow_mut() = Inner::Failed(msg.clone());
            panic!("{}", msg);
        }
    }
}

/// Builds an already-forced stream holding exactly the given elements.
pub fn from_list<T>(items: Vec<T>) -> Stream<T> {
    let mut s = Stream(Rc::new(RefCell::new(Inner::Ready(Front::Nil))));
    for item in items.into_iter().rev() {
        s = Stream(Rc::new(RefCell::new(Inner::Ready(Front::Cons(item, s)))));
    }
    s
}

impl<T: Clone> Stream<T> {
    /// Method form of [`front`].
    pub fn front(&self) -> Front<T> {
        front(self)
    }

    /// Iterates the stream's elements, forcing cells as it goes.
    pub fn iter(&self) -> Iter<T> {
        Iter { cur: self.clone() }
    }
}

/// Iterator over a stream; see [`Stream::iter`].
pub struct Iter<T: Clone> {
    cur: Stream<T>,
}

impl<T: Clone> Iterator for Iter<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        match front(&self.cur) {
            Front::Nil => None,
            Front::Cons(head, tail) => {
                self.cur = tail;
                Some(head)
            }
        }
    }
}

// Long forced chains (for example from `from_list` on a large vector) would
// otherwise drop recursively, one stack frame per cell.
impl<T> Drop for Stream<T> {
    fn drop(&mut self) {
        let mut next = take_tail_if_unique(&self.0);
        while let Some(rc) = next {
            next = take_tail_if_unique(&rc);
        }
    }
}

fn take_tail_if_unique<T>(rc: &Rc<RefCell<Inner<T>>>) -> Option<Rc<RefCell<Inner<T>>>> {
    if Rc::strong_count(rc) != 1 {
        return None;
    }
    let taken = {
        let mut inner = rc.borrow_mut();
        mem::replace(&mut *inner, Inner::Ready(Front::Nil))
    };
    match taken {
        Inner::Ready(Front::Cons(_, tail)) => {
            // Keep a second handle so the tail's own drop (at end of scope)
            // sees a shared cell and leaves the walk to this loop.
            let handle = Rc::clone(&tail.0);
            Some(handle)
        }
        _ => None,
    }
}
