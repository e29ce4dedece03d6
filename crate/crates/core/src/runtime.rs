//! Run-time support for extenders: the live relationship between every
//! support-object and its current extension-objects.
//!
//! Each support-object owns a doubly linked list of registry nodes in attach
//! order, plus a slot table holding at most one node per classer type. Nodes
//! live in a slab so attach and detach touch a constant number of nodes, and
//! dispatch walks exactly `k` of them.

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::diagnostic::Code;

/// Handle of a heap object. Handles are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub ext: ObjId,
    pub type_name: Rc<str>,
    pub is_classer: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("classer '{0}' is already instantiated on this support-object")]
    ClasserTaken(Rc<str>),
    #[error("object still supports {0} live extension-object(s)")]
    HasExtensions(usize),
    #[error("classer '{0}' is not instantiated on this support-object")]
    ClasserAbsent(Rc<str>),
    #[error("object is not an attached extension-object")]
    NotAttached,
    #[error("object is already attached to a support-object")]
    AlreadyAttached,
    #[error("attaching would make the support relation cyclic")]
    Cycle,
    #[error("use of a destroyed object")]
    Dead,
}

impl RegistryError {
    pub fn code(&self) -> Code {
        match self {
            RegistryError::ClasserTaken(_) => Code::R100,
            RegistryError::HasExtensions(_) => Code::R101,
            RegistryError::ClasserAbsent(_) => Code::R103,
            _ => Code::R104,
        }
    }
}

#[derive(Debug)]
struct Node {
    entry: Entry,
    support: ObjId,
    prev: Option<usize>,
    next: Option<usize>,
}

#[derive(Debug, Default)]
struct ExtensionList {
    head: Option<usize>,
    tail: Option<usize>,
    len: usize,
    classer_slots: HashMap<Rc<str>, usize>,
}

#[derive(Debug, Default)]
pub struct Runtime {
    nodes: Vec<Option<Node>>,
    free: Vec<usize>,
    lists: HashMap<ObjId, ExtensionList>,
    attached: HashMap<ObjId, usize>,
    live: Vec<bool>,
    visits: u64,
}

impl Runtime {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self) -> ObjId {
        self.live.push(true);
        ObjId((self.live.len() - 1) as u32)
    }

    pub fn is_live(&self, obj: ObjId) -> bool {
        self.live.get(obj.0 as usize).copied().unwrap_or(false)
    }

    /// Objects allocated so far; the next handle equals this value.
    pub fn allocated(&self) -> u32 {
        self.live.len() as u32
    }

    /// Registry nodes visited since the last reset.
    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn reset_visits(&mut self) {
        self.visits = 0;
    }

    fn node(&self, idx: usize) -> &Node {
        self.nodes[idx].as_ref().expect("registry node index is live")
    }

    fn node_mut(&mut self, idx: usize) -> &mut Node {
        self.nodes[idx].as_mut().expect("registry node index is live")
    }

    /// Number of current extension-objects of `support` (the `k` of dispatch cost).
    pub fn extension_count(&self, support: ObjId) -> usize {
        self.lists.get(&support).map_or(0, |l| l.len)
    }

    pub fn support_of(&self, ext: ObjId) -> Option<ObjId> {
        self.attached.get(&ext).map(|&i| self.node(i).support)
    }

    pub fn is_attached_to(&self, ext: ObjId, support: ObjId) -> bool {
        self.support_of(ext) == Some(support)
    }

    /// Appends `ext` to the extension list of `support`.
    pub fn attach(&mut self, support: ObjId, ext: ObjId, type_name: &str, is_classer: bool) -> Result<(), RegistryError> {
        if !self.is_live(support) || !self.is_live(ext) {
            return Err(RegistryError::Dead);
        }
        if self.attached.contains_key(&ext) {
            return Err(RegistryError::AlreadyAttached);
        }
        if ext == support || (self.extension_count(ext) > 0 && self.ancestors(support).any(|a| a == ext)) {
            return Err(RegistryError::Cycle);
        }
        let type_name: Rc<str> = Rc::from(type_name);
        let list = self.lists.entry(support).or_default();
        if is_classer && list.classer_slots.contains_key(&type_name) {
            return Err(RegistryError::ClasserTaken(type_name));
        }
        let tail = list.tail;
        let node = Node {
            entry: Entry { ext, type_name: type_name.clone(), is_classer },
            support,
            prev: tail,
            next: None,
        };
        let idx = match self.free.pop() {
            Some(i) => {
                self.nodes[i] = Some(node);
                i
            }
            None => {
                self.nodes.push(Some(node));
                self.nodes.len() - 1
            }
        };
        self.visits += 1;
        if let Some(t) = tail {
            self.visits += 1;
            self.node_mut(t).next = Some(idx);
        }
        let list = self.lists.get_mut(&support).expect("list created above");
        if list.head.is_none() {
            list.head = Some(idx);
        }
        list.tail = Some(idx);
        list.len += 1;
        if is_classer {
            list.classer_slots.insert(type_name, idx);
        }
        self.attached.insert(ext, idx);
        Ok(())
    }

    /// Unlinks `ext` from its support-object, keeping the order of the rest.
    pub fn detach(&mut self, ext: ObjId) -> Result<(), RegistryError> {
        let &idx = self.attached.get(&ext).ok_or(RegistryError::NotAttached)?;
        let children = self.extension_count(ext);
        if children > 0 {
            return Err(RegistryError::HasExtensions(children));
        }
        self.attached.remove(&ext);
        let node = self.nodes[idx].take().expect("attached node is live");
        self.free.push(idx);
        self.visits += 1;
        if let Some(p) = node.prev {
            self.visits += 1;
            self.node_mut(p).next = node.next;
        }
        if let Some(n) = node.next {
            self.visits += 1;
            self.node_mut(n).prev = node.prev;
        }
        let list = self.lists.get_mut(&node.support).expect("support has a list");
        if list.head == Some(idx) {
            list.head = node.next;
        }
        if list.tail == Some(idx) {
            list.tail = node.prev;
        }
        list.len -= 1;
        if node.entry.is_classer {
            list.classer_slots.remove(&node.entry.type_name);
        }
        Ok(())
    }

    /// Snapshot of the extension list of `support` in attach order; visits
    /// exactly `k` nodes. Dispatch runs behaviors over this snapshot and skips
    /// entries detached meanwhile, so extensions attached during a dispatch
    /// first see the next one.
    pub fn dispatch_order(&mut self, support: ObjId) -> Vec<Entry> {
        let mut out = Vec::with_capacity(self.extension_count(support));
        let mut cur = self.lists.get(&support).and_then(|l| l.head);
        while let Some(idx) = cur {
            let node = self.node(idx);
            out.push(node.entry.clone());
            cur = node.next;
        }
        self.visits += out.len() as u64;
        out
    }

    pub fn classer_present(&self, support: ObjId, type_name: &str) -> bool {
        self.lists
            .get(&support)
            .is_some_and(|l| l.classer_slots.contains_key(type_name))
    }

    pub fn classer_get(&self, support: ObjId, type_name: &str) -> Result<ObjId, RegistryError> {
        self.lists
            .get(&support)
            .and_then(|l| l.classer_slots.get(type_name))
            .map(|&i| self.node(i).entry.ext)
            .ok_or_else(|| RegistryError::ClasserAbsent(Rc::from(type_name)))
    }

    /// Destroys `obj`: refuses while it supports live extensions, detaches it
    /// if it is an extension-object, then marks it dead.
    pub fn destroy(&mut self, obj: ObjId) -> Result<(), RegistryError> {
        if !self.is_live(obj) {
            return Err(RegistryError::Dead);
        }
        let children = self.extension_count(obj);
        if children > 0 {
            return Err(RegistryError::HasExtensions(children));
        }
        if self.attached.contains_key(&obj) {
            self.detach(obj)?;
        }
        self.lists.remove(&obj);
        self.live[obj.0 as usize] = false;
        Ok(())
    }

    fn ancestors(&self, obj: ObjId) -> impl Iterator<Item = ObjId> + '_ {
        let mut cur = Some(obj);
        std::iter::from_fn(move || {
            let o = cur?;
            cur = self.support_of(o);
            Some(o)
        })
    }

    /// True if the support relation is a forest (no object is its own ancestor).
    pub fn is_forest(&self) -> bool {
        self.attached.keys().all(|&ext| {
            let mut steps = 0;
            let mut cur = self.support_of(ext);
            while let Some(s) = cur {
                if s == ext || steps > self.attached.len() {
                    return false;
                }
                steps += 1;
                cur = self.support_of(s);
            }
            true
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exts(rt: &mut Runtime, support: ObjId) -> Vec<ObjId> {
        rt.dispatch_order(support).into_iter().map(|e| e.ext).collect()
    }

    #[test]
    fn attach_keeps_order() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let (o1, o2, e1) = (rt.alloc(), rt.alloc(), rt.alloc());
        assert_eq!(rt.extension_count(g), 0);
        rt.attach(g, o1, "Orientation", false).unwrap();
        assert_eq!(rt.extension_count(g), 1);
        rt.attach(g, o2, "Orientation", false).unwrap();
        rt.attach(g, e1, "Embedding", false).unwrap();
        assert_eq!(exts(&mut rt, g), vec![o1, o2, e1]);
        assert_eq!(rt.extension_count(g), 3);
    }

    #[test]
    fn second_classer_rejected() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let (a, b) = (rt.alloc(), rt.alloc());
        rt.attach(g, a, "ConnCompSet", true).unwrap();
        let err = rt.attach(g, b, "ConnCompSet", true).unwrap_err();
        assert_eq!(err.code(), Code::R100);
        assert_eq!(rt.classer_get(g, "ConnCompSet"), Ok(a));
    }

    #[test]
    fn detach_in_place_and_reattach_at_tail() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let (o1, o2, e1) = (rt.alloc(), rt.alloc(), rt.alloc());
        for (x, t) in [(o1, "O"), (o2, "O"), (e1, "E")] {
            rt.attach(g, x, t, false).unwrap();
        }
        rt.detach(o2).unwrap();
        assert_eq!(exts(&mut rt, g), vec![o1, e1]);
        rt.attach(g, o2, "O", false).unwrap();
        assert_eq!(exts(&mut rt, g), vec![o1, e1, o2]);
        rt.detach(o1).unwrap();
        rt.detach(o2).unwrap();
        assert_eq!(exts(&mut rt, g), vec![e1]);
    }

    #[test]
    fn detach_refused_while_supporting() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let (emb, shape) = (rt.alloc(), rt.alloc());
        rt.attach(g, emb, "Embedding", false).unwrap();
        rt.attach(emb, shape, "OrthogonalShape", false).unwrap();
        assert_eq!(rt.detach(emb).unwrap_err().code(), Code::R101);
        rt.detach(shape).unwrap();
        rt.detach(emb).unwrap();
    }

    #[test]
    fn classer_lifecycle() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let p = rt.alloc();
        assert!(!rt.classer_present(g, "Planar"));
        rt.attach(g, p, "Planar", true).unwrap();
        assert!(rt.classer_present(g, "Planar"));
        rt.destroy(p).unwrap();
        assert!(!rt.classer_present(g, "Planar"));
        assert!(!rt.is_live(p));
        assert_eq!(rt.classer_get(g, "Planar").unwrap_err().code(), Code::R103);
    }

    #[test]
    fn independent_classer_slots() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let (a, b) = (rt.alloc(), rt.alloc());
        rt.attach(g, a, "Connected", true).unwrap();
        rt.attach(g, b, "Planar", true).unwrap();
        assert_eq!(rt.classer_get(g, "Connected"), Ok(a));
        assert_eq!(rt.classer_get(g, "Planar"), Ok(b));
    }

    #[test]
    fn destroy_order() {
        let mut rt = Runtime::new();
        let g = rt.alloc();
        let l = rt.alloc();
        rt.attach(g, l, "Labeling", false).unwrap();
        assert_eq!(rt.destroy(g).unwrap_err().code(), Code::R101);
        rt.destroy(l).unwrap();
        rt.destroy(g).unwrap();
        let plain = rt.alloc();
        rt.destroy(plain).unwrap();
        assert_eq!(rt.destroy(plain), Err(RegistryError::Dead));
    }

    #[test]
    fn cycles_rejected() {
        let mut rt = Runtime::new();
        let (a, b) = (rt.alloc(), rt.alloc());
        rt.attach(a, b, "B", false).unwrap();
        let c = rt.alloc();
        rt.attach(b, c, "C", false).unwrap();
        // b is attached already; a fresh object cannot adopt its own ancestor
        assert_eq!(rt.attach(c, a, "A", false), Err(RegistryError::Cycle));
        assert!(rt.is_forest());
    }

    #[test]
    fn constant_cost_attach_detach() {
        for k in [10usize, 100, 1000] {
            let mut rt = Runtime::new();
            let g = rt.alloc();
            let ids: Vec<_> = (0..k).map(|_| rt.alloc()).collect();
            for &x in &ids {
                rt.attach(g, x, "E", false).unwrap();
            }
            let extra = rt.alloc();
            rt.reset_visits();
            rt.attach(g, extra, "E", false).unwrap();
            assert_eq!(rt.visits(), 2);
            rt.reset_visits();
            rt.detach(ids[k / 2]).unwrap();
            assert_eq!(rt.visits(), 3);
            rt.reset_visits();
            let order = rt.dispatch_order(g);
            assert_eq!(rt.visits(), order.len() as u64);
            assert_eq!(order.len(), k);
        }
    }
}
