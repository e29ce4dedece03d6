//! Tree-walking interpreter for core ECO-mini text.
//!
//! Runtime ECO semantics live here: intrinsic dispatch over the
//! [`Runtime`](crate::runtime::Runtime) registry, the write barrier that
//! confines dispatched behaviors to their own extension-object, and the
//! veto / fatal split between `Check_` and `Pre_`/`Post_` E-methods.

mod value;

pub use value::{IntTree, ListRef, Value};

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::diagnostic::Code;
use crate::frontend::ast::*;
use crate::lowering::{behavior_method_name, parse_core, CoreProgram, MetaEntry, SUPPORT_FIELD};
use crate::runtime::{ObjId, RegistryError, Runtime};
use crate::stdlib::planarity;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;
const MAX_CALL_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("runtime error[{code}]: {message}")]
pub struct RuntimeError {
    pub code: Code,
    pub message: String,
}

impl RuntimeError {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        RuntimeError { code, message: message.into() }
    }
}

/// Non-local exit from evaluation.
#[derive(Debug, Clone)]
pub enum Unwind {
    /// A user `throw`; catchable.
    Throw(Value),
    /// An `R1xx` runtime error; never catchable.
    Fatal(RuntimeError),
}

impl Unwind {
    pub fn code(&self) -> Option<Code> {
        match self {
            Unwind::Fatal(e) => Some(e.code),
            Unwind::Throw(_) => None,
        }
    }
}

impl fmt::Display for Unwind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unwind::Throw(v) => write!(f, "uncaught exception: {v}"),
            Unwind::Fatal(e) => write!(f, "{e}"),
        }
    }
}

impl From<RuntimeError> for Unwind {
    fn from(e: RuntimeError) -> Self {
        Unwind::Fatal(e)
    }
}

impl From<RegistryError> for Unwind {
    fn from(e: RegistryError) -> Self {
        Unwind::Fatal(RuntimeError::new(e.code(), e.to_string()))
    }
}

fn fault(msg: impl Into<String>) -> Unwind {
    Unwind::Fatal(RuntimeError::new(Code::R104, msg))
}

type EvalResult<T> = Result<T, Unwind>;

/// Result of running a whole program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// 0 normal return, 1 uncaught `throw`, 2 runtime error.
    pub exit_code: i32,
    pub stdout: String,
    /// Error report for stderr, empty on success.
    pub stderr: String,
}

/// One executed E-method behavior, recorded when tracing is enabled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorRun {
    pub support: ObjId,
    pub ext: ObjId,
    pub class: Rc<str>,
    pub emethod: Rc<str>,
    /// Nesting level: 0 for a dispatch outside any behavior.
    pub depth: usize,
}

#[derive(Debug)]
struct ClassRt {
    name: Rc<str>,
    ancestors: Vec<Rc<str>>,
    field_index: HashMap<Rc<str>, usize>,
    field_count: usize,
    methods: HashMap<String, Rc<MethodDecl>>,
    statics: HashMap<String, Rc<MethodDecl>>,
    ctors: Vec<Rc<CtorDecl>>,
    behaviors: HashSet<String>,
    /// Support class if this is a classer.
    classer_of: Option<Rc<str>>,
}

impl ClassRt {
    fn is_a(&self, other: &str) -> bool {
        self.ancestors.iter().any(|a| &**a == other)
    }
}

#[derive(Debug)]
struct ObjectData {
    class: Rc<ClassRt>,
    fields: Vec<Value>,
}

struct Frame<'b> {
    this: Option<ObjId>,
    class: Option<Rc<ClassRt>>,
    vars: Vec<(&'b str, Value)>,
}

impl<'b> Frame<'b> {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    fn lookup_mut(&mut self, name: &str) -> Option<&mut Value> {
        self.vars.iter_mut().rev().find(|(n, _)| *n == name).map(|(_, v)| v)
    }
}

enum Flow {
    Normal,
    Return(Value),
}

#[derive(Debug, Clone, Copy)]
struct BarrierFrame {
    bound: ObjId,
    alloc_floor: u32,
}

pub struct Interpreter {
    classes: HashMap<Rc<str>, Rc<ClassRt>>,
    heap: Vec<ObjectData>,
    runtime: Runtime,
    barrier: Vec<BarrierFrame>,
    stdout: String,
    steps: u64,
    max_steps: u64,
    depth: usize,
    tracing: bool,
    trace: Vec<BehaviorRun>,
}

/// Parses core text and executes static method `entry` of class `Main`.
pub fn run_program(core_text: &str, entry: &str, max_steps: u64) -> RunOutcome {
    let core = match parse_core(core_text, "<core>") {
        Ok(c) => c,
        Err(e) => {
            return RunOutcome {
                exit_code: 2,
                stdout: String::new(),
                stderr: format!("runtime error[R104]: {e}\n"),
            }
        }
    };
    match Interpreter::new(&core) {
        Ok(mut interp) => {
            interp.set_max_steps(max_steps);
            interp.run_main(entry)
        }
        Err(e) => RunOutcome { exit_code: 2, stdout: String::new(), stderr: format!("{e}\n") },
    }
}

impl Interpreter {
    /// Loads a core program: builds the class table and checks metadata.
    pub fn new(core: &CoreProgram) -> Result<Self, RuntimeError> {
        let decls: HashMap<&str, &ClassDecl> = core.module.classes.iter().map(|c| (c.name.as_str(), c)).collect();
        let mut behaviors: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut classer_of: HashMap<&str, &str> = HashMap::new();
        for entry in &core.meta {
            match entry {
                MetaEntry::Behavior { class, emethod } => behaviors.entry(class).or_default().push(emethod),
                MetaEntry::Classer { class, support } => {
                    classer_of.insert(class, support);
                }
                MetaEntry::Support { .. } | MetaEntry::Extender { .. } => {}
            }
        }
        let load_err = |msg: String| RuntimeError::new(Code::R104, msg);

        let mut classes = HashMap::new();
        for decl in &core.module.classes {
            // base-first chain
            let mut chain = vec![decl];
            let mut cur = decl;
            while let Some(base) = &cur.base {
                let b = decls
                    .get(base.name.as_str())
                    .ok_or_else(|| load_err(format!("unknown base class '{}'", base.name)))?;
                if chain.iter().any(|c| c.name == b.name) {
                    return Err(load_err(format!("inheritance cycle through '{}'", decl.name)));
                }
                chain.push(b);
                cur = b;
            }
            let ancestors: Vec<Rc<str>> = chain.iter().map(|c| Rc::from(c.name.as_str())).collect();
            let mut field_index = HashMap::new();
            let mut methods = HashMap::new();
            let mut statics = HashMap::new();
            let mut class_behaviors = HashSet::new();
            for c in chain.iter().rev() {
                for m in &c.members {
                    match m {
                        Member::Field(f) => {
                            let n = field_index.len();
                            field_index.entry(Rc::from(f.name.as_str())).or_insert(n);
                        }
                        Member::Method(m) if m.is_static => {
                            statics.insert(m.name.clone(), Rc::new(m.clone()));
                        }
                        Member::Method(m) => {
                            methods.insert(m.name.clone(), Rc::new(m.clone()));
                        }
                        _ => {}
                    }
                }
                for &emethod in behaviors.get(c.name.as_str()).into_iter().flatten() {
                    if !methods.contains_key(&behavior_method_name(emethod)) {
                        return Err(load_err(format!(
                            "metadata names behavior '{emethod}' but class '{}' defines no '{}'",
                            c.name,
                            behavior_method_name(emethod)
                        )));
                    }
                    class_behaviors.insert(emethod.to_string());
                }
            }
            let ctors = decl
                .members
                .iter()
                .filter_map(|m| match m {
                    Member::Ctor(c) => Some(Rc::new(c.clone())),
                    _ => None,
                })
                .collect();
            let field_count = field_index.len();
            classes.insert(
                Rc::from(decl.name.as_str()),
                Rc::new(ClassRt {
                    name: Rc::from(decl.name.as_str()),
                    ancestors,
                    field_index,
                    field_count,
                    methods,
                    statics,
                    ctors,
                    behaviors: class_behaviors,
                    classer_of: classer_of.get(decl.name.as_str()).map(|s| Rc::from(*s)),
                }),
            );
        }
        Ok(Interpreter {
            classes,
            heap: Vec::new(),
            runtime: Runtime::new(),
            barrier: Vec::new(),
            stdout: String::new(),
            steps: 0,
            max_steps: DEFAULT_MAX_STEPS,
            depth: 0,
            tracing: false,
            trace: Vec::new(),
        })
    }

    pub fn set_max_steps(&mut self, n: u64) {
        self.max_steps = n;
    }

    /// Records every executed behavior into [`trace`](Self::trace).
    pub fn set_tracing(&mut self, on: bool) {
        self.tracing = on;
    }

    pub fn trace(&self) -> &[BehaviorRun] {
        &self.trace
    }

    pub fn clear_trace(&mut self) {
        self.trace.clear();
    }

    pub fn stdout(&self) -> &str {
        &self.stdout
    }

    pub fn take_stdout(&mut self) -> String {
        std::mem::take(&mut self.stdout)
    }

    pub fn runtime(&self) -> &Runtime {
        &self.runtime
    }

    pub fn runtime_mut(&mut self) -> &mut Runtime {
        &mut self.runtime
    }

    /// Runs `Main.<entry>()` and maps the result to exit codes.
    pub fn run_main(&mut self, entry: &str) -> RunOutcome {
        let result = self.call_static("Main", entry, vec![]);
        let stdout = self.take_stdout();
        match result {
            Ok(_) => RunOutcome { exit_code: 0, stdout, stderr: String::new() },
            Err(u @ Unwind::Throw(_)) => RunOutcome { exit_code: 1, stdout, stderr: format!("{u}\n") },
            Err(u @ Unwind::Fatal(_)) => RunOutcome { exit_code: 2, stdout, stderr: format!("{u}\n") },
        }
    }

    fn begin_host_call(&mut self) {
        self.steps = 0;
        self.depth = 0;
        self.barrier.clear();
    }

    /// Host entry: `Class.method(args)` for a static method.
    pub fn call_static(&mut self, class: &str, method: &str, args: Vec<Value>) -> EvalResult<Value> {
        self.begin_host_call();
        self.invoke_static(class, method, args)
    }

    /// Host entry: `obj.method(args)`.
    pub fn call_method(&mut self, obj: &Value, method: &str, args: Vec<Value>) -> EvalResult<Value> {
        self.begin_host_call();
        self.invoke_method(obj, method, args)
    }

    /// Host entry: `new Class(args)`. Private constructors are refused.
    pub fn instantiate(&mut self, class: &str, args: Vec<Value>) -> EvalResult<Value> {
        self.begin_host_call();
        self.construct(class, args, None)
    }

    /// Reads a field without running code.
    pub fn field(&self, obj: &Value, name: &str) -> Result<Value, RuntimeError> {
        let id = obj
            .as_obj()
            .ok_or_else(|| RuntimeError::new(Code::R104, format!("field access on {}", obj.type_name())))?;
        self.read_field(id, name).map_err(|u| match u {
            Unwind::Fatal(e) => e,
            Unwind::Throw(_) => unreachable!("field reads never throw"),
        })
    }

    pub fn class_of(&self, obj: ObjId) -> Option<&str> {
        self.heap.get(obj.0 as usize).map(|o| &*o.class.name)
    }

    pub fn is_live(&self, obj: ObjId) -> bool {
        self.runtime.is_live(obj)
    }

    fn step(&mut self) -> EvalResult<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(fault(format!("step budget of {} exceeded", self.max_steps)));
        }
        Ok(())
    }

    fn class(&self, name: &str) -> EvalResult<Rc<ClassRt>> {
        self.classes
            .get(name)
            .cloned()
            .ok_or_else(|| fault(format!("unknown class '{name}'")))
    }

    fn object(&self, id: ObjId) -> EvalResult<&ObjectData> {
        if !self.runtime.is_live(id) {
            return Err(fault(format!("use of destroyed object #{}", id.0)));
        }
        Ok(&self.heap[id.0 as usize])
    }

    fn read_field(&self, id: ObjId, name: &str) -> EvalResult<Value> {
        let obj = self.object(id)?;
        let idx = obj
            .class
            .field_index
            .get(name)
            .ok_or_else(|| fault(format!("class '{}' has no field '{name}'", obj.class.name)))?;
        Ok(obj.fields[*idx].clone())
    }

    fn write_field(&mut self, id: ObjId, name: &str, value: Value, barrier: bool) -> EvalResult<()> {
        let class = self.object(id)?.class.clone();
        let idx = *class
            .field_index
            .get(name)
            .ok_or_else(|| fault(format!("class '{}' has no field '{name}'", class.name)))?;
        if barrier {
            if let Some(frame) = self.barrier.last() {
                if id != frame.bound && id.0 < frame.alloc_floor {
                    let bound_class = self.heap[frame.bound.0 as usize].class.name.clone();
                    return Err(Unwind::Fatal(RuntimeError::new(
                        Code::R102,
                        format!(
                            "behavior of {}#{} may not assign field '{name}' of {}#{}",
                            bound_class, frame.bound.0, class.name, id.0
                        ),
                    )));
                }
            }
        }
        self.heap[id.0 as usize].fields[idx] = value;
        Ok(())
    }

    fn alloc(&mut self, class: Rc<ClassRt>) -> ObjId {
        let id = self.runtime.alloc();
        let fields = vec![Value::Null; class.field_count];
        self.heap.push(ObjectData { class, fields });
        debug_assert_eq!(self.heap.len() as u32, self.runtime.allocated());
        id
    }

    fn enter(&mut self) -> EvalResult<()> {
        self.depth += 1;
        if self.depth > MAX_CALL_DEPTH {
            return Err(fault(format!("call depth limit of {MAX_CALL_DEPTH} exceeded")));
        }
        Ok(())
    }

    fn construct(&mut self, class_name: &str, args: Vec<Value>, caller: Option<&ClassRt>) -> EvalResult<Value> {
        let class = self.class(class_name)?;
        let ctor = class.ctors.iter().find(|c| c.params.len() == args.len()).cloned();
        if ctor.is_none() && !(class.ctors.is_empty() && args.is_empty()) {
            return Err(fault(format!("class '{class_name}' has no constructor taking {} argument(s)", args.len())));
        }
        if let Some(c) = &ctor {
            if c.is_private && caller.is_none_or(|k| *k.name != *class.name) {
                return Err(fault(format!("constructor of '{class_name}' is private")));
            }
        }
        let id = self.alloc(class.clone());
        if let Some(ctor) = ctor {
            let mut frame = Frame { this: Some(id), class: Some(class), vars: Vec::new() };
            for (p, a) in ctor.params.iter().zip(args) {
                frame.vars.push((p.as_str(), a));
            }
            self.enter()?;
            let r = self.exec_block(&ctor.body, &mut frame);
            self.depth -= 1;
            r?;
        }
        Ok(Value::Obj(id))
    }

    fn invoke_static(&mut self, class_name: &str, method: &str, args: Vec<Value>) -> EvalResult<Value> {
        let class = self.class(class_name)?;
        let m = class
            .statics
            .get(method)
            .cloned()
            .ok_or_else(|| fault(format!("class '{class_name}' has no static method '{method}'")))?;
        self.run_method(&m, None, class, args)
    }

    fn invoke_method(&mut self, recv: &Value, method: &str, args: Vec<Value>) -> EvalResult<Value> {
        match recv {
            Value::Obj(id) => {
                let class = self.object(*id)?.class.clone();
                let m = class
                    .methods
                    .get(method)
                    .cloned()
                    .ok_or_else(|| fault(format!("class '{}' has no method '{method}'", class.name)))?;
                self.run_method(&m, Some(*id), class, args)
            }
            Value::List(list) => list_method(list, method, args),
            other => Err(fault(format!("cannot call method '{method}' on {}", other.type_name()))),
        }
    }

    fn run_method(&mut self, m: &Rc<MethodDecl>, this: Option<ObjId>, class: Rc<ClassRt>, args: Vec<Value>) -> EvalResult<Value> {
        if m.params.len() != args.len() {
            return Err(fault(format!(
                "method '{}' expects {} argument(s), got {}",
                m.name,
                m.params.len(),
                args.len()
            )));
        }
        let m = m.clone();
        let mut frame = Frame { this, class: Some(class), vars: Vec::with_capacity(m.params.len() + 4) };
        for (p, a) in m.params.iter().zip(args) {
            frame.vars.push((p.as_str(), a));
        }
        self.enter()?;
        let r = self.exec_block(&m.body, &mut frame);
        self.depth -= 1;
        match r? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Value::Null),
        }
    }

    fn exec_block<'b>(&mut self, block: &'b Block, frame: &mut Frame<'b>) -> EvalResult<Flow> {
        let mark = frame.vars.len();
        let mut flow = Ok(Flow::Normal);
        for s in &block.stmts {
            match self.exec(s, frame) {
                Ok(Flow::Normal) => {}
                other => {
                    flow = other;
                    break;
                }
            }
        }
        frame.vars.truncate(mark);
        flow
    }

    fn exec<'b>(&mut self, s: &'b Stmt, frame: &mut Frame<'b>) -> EvalResult<Flow> {
        self.step()?;
        match &s.kind {
            StmtKind::Var { name, init } => {
                let v = self.eval(init, frame)?;
                frame.vars.push((name.as_str(), v));
            }
            StmtKind::Assign { target, value } => match &target.kind {
                ExprKind::Ident(name) => {
                    let v = self.eval(value, frame)?;
                    *frame
                        .lookup_mut(name)
                        .ok_or_else(|| fault(format!("assignment to undeclared variable '{name}'")))? = v;
                }
                ExprKind::Field { obj, name } => {
                    let recv = self.eval(obj, frame)?;
                    let v = self.eval(value, frame)?;
                    let id = recv
                        .as_obj()
                        .ok_or_else(|| fault(format!("field assignment on {}", recv.type_name())))?;
                    self.write_field(id, name, v, true)?;
                }
                ExprKind::Index { obj, index } => {
                    let list = self.eval(obj, frame)?;
                    let i = self.eval(index, frame)?;
                    let v = self.eval(value, frame)?;
                    list_method(
                        list.as_list().ok_or_else(|| fault(format!("indexing {}", list.type_name())))?,
                        "set",
                        vec![i, v],
                    )?;
                }
                _ => return Err(fault("invalid assignment target")),
            },
            StmtKind::If { cond, then_block, else_block } => {
                if self.eval_bool(cond, frame)? {
                    return self.exec_block(then_block, frame);
                } else if let Some(e) = else_block {
                    return self.exec_block(e, frame);
                }
            }
            StmtKind::While { cond, body } => {
                while self.eval_bool(cond, frame)? {
                    if let Flow::Return(v) = self.exec_block(body, frame)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(e, frame)?,
                    None => Value::Null,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Throw(e) => {
                let v = self.eval(e, frame)?;
                return Err(Unwind::Throw(v));
            }
            StmtKind::Try { body, var, handler } => {
                let depth = self.depth;
                let barrier = self.barrier.len();
                match self.exec_block(body, frame) {
                    Err(Unwind::Throw(v)) => {
                        self.depth = depth;
                        self.barrier.truncate(barrier);
                        let mark = frame.vars.len();
                        frame.vars.push((var.as_str(), v));
                        let r = self.exec_block(handler, frame);
                        frame.vars.truncate(mark);
                        return r;
                    }
                    other => return other,
                }
            }
            StmtKind::Delete(e) => {
                let v = self.eval(e, frame)?;
                self.destroy(&v)?;
            }
            StmtKind::Expr(e) => {
                self.eval(e, frame)?;
            }
        }
        Ok(Flow::Normal)
    }

    fn eval_bool<'b>(&mut self, e: &'b Expr, frame: &mut Frame<'b>) -> EvalResult<bool> {
        let v = self.eval(e, frame)?;
        v.as_bool()
            .ok_or_else(|| fault(format!("condition must be bool, got {}", v.type_name())))
    }

    fn eval_args<'b>(&mut self, args: &'b [Expr], frame: &mut Frame<'b>) -> EvalResult<Vec<Value>> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            out.push(self.eval(a, frame)?);
        }
        Ok(out)
    }

    fn eval<'b>(&mut self, e: &'b Expr, frame: &mut Frame<'b>) -> EvalResult<Value> {
        self.step()?;
        use ExprKind::*;
        Ok(match &e.kind {
            Int(n) => Value::Int(*n),
            Str(s) => Value::str(s),
            Bool(b) => Value::Bool(*b),
            Null => Value::Null,
            This => Value::Obj(frame.this.ok_or_else(|| fault("'this' used outside an instance method"))?),
            Ident(name) => frame
                .lookup(name)
                .cloned()
                .ok_or_else(|| fault(format!("undefined variable '{name}'")))?,
            List(items) => Value::list(self.eval_args(items, frame)?),
            New { class, args } => {
                let args = self.eval_args(args, frame)?;
                let caller = frame.class.clone();
                self.construct(class, args, caller.as_deref())?
            }
            Field { obj, name } => {
                let recv = self.eval(obj, frame)?;
                let id = recv
                    .as_obj()
                    .ok_or_else(|| fault(format!("field access '{name}' on {}", recv.type_name())))?;
                self.read_field(id, name)?
            }
            MethodCall { obj, method, args } => {
                if let Ident(name) = &obj.kind {
                    if frame.lookup(name).is_none() && self.classes.contains_key(name.as_str()) {
                        let args = self.eval_args(args, frame)?;
                        return self.invoke_static(name, method, args);
                    }
                }
                let recv = self.eval(obj, frame)?;
                let args = self.eval_args(args, frame)?;
                self.invoke_method(&recv, method, args)?
            }
            Index { obj, index } => {
                let list = self.eval(obj, frame)?;
                let i = self.eval(index, frame)?;
                list_method(
                    list.as_list().ok_or_else(|| fault(format!("indexing {}", list.type_name())))?,
                    "get",
                    vec![i],
                )?
            }
            Call { func, args } => {
                let args = self.eval_args(args, frame)?;
                self.call_builtin(func, args)?
            }
            Unary { op, expr } => {
                let v = self.eval(expr, frame)?;
                match (op, v) {
                    (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                    (UnaryOp::Neg, Value::Int(n)) => {
                        Value::Int(n.checked_neg().ok_or_else(|| fault("integer overflow"))?)
                    }
                    (_, v) => return Err(fault(format!("bad operand type {} for unary operator", v.type_name()))),
                }
            }
            Binary { op: BinaryOp::And, lhs, rhs } => {
                Value::Bool(self.eval_bool(lhs, frame)? && self.eval_bool(rhs, frame)?)
            }
            Binary { op: BinaryOp::Or, lhs, rhs } => {
                Value::Bool(self.eval_bool(lhs, frame)? || self.eval_bool(rhs, frame)?)
            }
            Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, frame)?;
                let r = self.eval(rhs, frame)?;
                binary(*op, l, r)?
            }
            ClasserTest { .. } | ClasserAccess { .. } | CallEMethod { .. } => {
                return Err(fault("ECO surface construct in core program"))
            }
        })
    }

    fn call_builtin(&mut self, func: &str, args: Vec<Value>) -> EvalResult<Value> {
        let arity = |n: usize| -> EvalResult<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(fault(format!("'{func}' expects {n} argument(s), got {}", args.len())))
            }
        };
        match func {
            "print" => {
                arity(1)?;
                self.stdout.push_str(&args[0].to_string());
                self.stdout.push('\n');
                Ok(Value::Null)
            }
            "builtin_is_planar" => {
                arity(1)?;
                let edges = edge_pairs(&args[0])?;
                planarity::is_planar(&edges)
                    .map(Value::Bool)
                    .map_err(|e| fault(e.to_string()))
            }
            "eco_attach" => {
                arity(4)?;
                let support = self.obj_arg(&args[0], func)?;
                let ext = self.obj_arg(&args[1], func)?;
                let name = str_arg(&args[2], func)?;
                let is_classer = args[3].as_bool().ok_or_else(|| fault("eco_attach: flag must be bool"))?;
                self.runtime.attach(support, ext, &name, is_classer)?;
                // registry bookkeeping is exempt from the write barrier
                self.write_field(ext, SUPPORT_FIELD, Value::Obj(support), false)?;
                Ok(Value::Null)
            }
            "eco_detach" => {
                arity(1)?;
                let ext = self.obj_arg(&args[0], func)?;
                self.runtime.detach(ext)?;
                Ok(Value::Null)
            }
            "eco_destroy" => {
                arity(1)?;
                self.destroy(&args[0])?;
                Ok(Value::Null)
            }
            "eco_has" | "eco_get" => {
                arity(2)?;
                let support = self.obj_arg(&args[0], func)?;
                let name = str_arg(&args[1], func)?;
                self.check_classer_over(support, &name)?;
                if func == "eco_has" {
                    Ok(Value::Bool(self.runtime.classer_present(support, &name)))
                } else {
                    Ok(Value::Obj(self.runtime.classer_get(support, &name)?))
                }
            }
            "eco_dispatch" => {
                arity(3)?;
                let support = self.obj_arg(&args[0], func)?;
                let name = str_arg(&args[1], func)?;
                let list = args[2].as_list().ok_or_else(|| fault("eco_dispatch: arguments must be a list"))?;
                let call_args = list.borrow().clone();
                self.dispatch(support, &name, call_args)?;
                Ok(Value::Null)
            }
            _ => Err(fault(format!("unknown function '{func}'"))),
        }
    }

    fn obj_arg(&self, v: &Value, func: &str) -> EvalResult<ObjId> {
        let id = v
            .as_obj()
            .ok_or_else(|| fault(format!("{func}: expected object, got {}", v.type_name())))?;
        self.object(id)?;
        Ok(id)
    }

    fn check_classer_over(&self, support: ObjId, classer: &str) -> EvalResult<()> {
        let support_class = self.object(support)?.class.clone();
        let ok = self
            .classes
            .get(classer)
            .and_then(|c| c.classer_of.clone())
            .is_some_and(|s| support_class.is_a(&s));
        if ok {
            Ok(())
        } else {
            Err(Unwind::Fatal(RuntimeError::new(
                Code::R103,
                format!("'{classer}' is not a classer over class '{}'", support_class.name),
            )))
        }
    }

    fn destroy(&mut self, v: &Value) -> EvalResult<()> {
        let id = v
            .as_obj()
            .ok_or_else(|| fault(format!("delete of {}", v.type_name())))?;
        self.runtime.destroy(id)?;
        Ok(())
    }

    /// Runs the behavior for `emethod` of every current extension-object of
    /// `support`, in attach order. The first throw aborts the rest.
    pub fn dispatch(&mut self, support: ObjId, emethod: &str, args: Vec<Value>) -> EvalResult<()> {
        let entries = self.runtime.dispatch_order(support);
        let method = behavior_method_name(emethod);
        let fatal_on_throw = emethod.starts_with("Pre_") || emethod.starts_with("Post_");
        for entry in entries {
            if !self.runtime.is_live(entry.ext) || !self.runtime.is_attached_to(entry.ext, support) {
                continue;
            }
            let class = self.heap[entry.ext.0 as usize].class.clone();
            if !class.behaviors.contains(emethod) {
                continue;
            }
            let m = class
                .methods
                .get(&method)
                .cloned()
                .ok_or_else(|| fault(format!("missing behavior method '{method}'")))?;
            if self.tracing {
                self.trace.push(BehaviorRun {
                    support,
                    ext: entry.ext,
                    class: class.name.clone(),
                    emethod: Rc::from(emethod),
                    depth: self.barrier.len(),
                });
            }
            self.barrier.push(BarrierFrame { bound: entry.ext, alloc_floor: self.runtime.allocated() });
            let result = self.run_method(&m, Some(entry.ext), class.clone(), args.clone());
            self.barrier.pop();
            match result {
                Ok(_) => {}
                Err(Unwind::Throw(v)) if fatal_on_throw => {
                    return Err(Unwind::Fatal(RuntimeError::new(
                        Code::R105,
                        format!("behavior {}.{emethod} threw during update phase: {v}", class.name),
                    )))
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

fn str_arg(v: &Value, func: &str) -> EvalResult<Rc<str>> {
    match v {
        Value::Str(s) => Ok(s.clone()),
        other => Err(fault(format!("{func}: expected string, got {}", other.type_name()))),
    }
}

fn edge_pairs(v: &Value) -> EvalResult<Vec<(i64, i64)>> {
    let bad = || fault("builtin_is_planar expects a list of [u, v] integer pairs");
    let list = v.as_list().ok_or_else(bad)?;
    let list = list.borrow();
    list.iter()
        .map(|p| {
            let p = p.as_list().ok_or_else(bad)?.borrow();
            match &p[..] {
                [Value::Int(a), Value::Int(b)] => Ok((*a, *b)),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn index_arg(v: &Value, len: usize, allow_end: bool) -> EvalResult<usize> {
    let i = v
        .as_int()
        .ok_or_else(|| fault(format!("list index must be int, got {}", v.type_name())))?;
    let limit = if allow_end { len + 1 } else { len };
    if i < 0 || i as usize >= limit {
        return Err(fault(format!("list index {i} out of range for length {len}")));
    }
    Ok(i as usize)
}

fn list_method(list: &ListRef, method: &str, args: Vec<Value>) -> EvalResult<Value> {
    let want = match method {
        "push" | "get" | "remove_at" => 1,
        "size" => 0,
        "set" => 2,
        _ => return Err(fault(format!("lists have no method '{method}'"))),
    };
    if args.len() != want {
        return Err(fault(format!("list method '{method}' expects {want} argument(s), got {}", args.len())));
    }
    let mut args = args.into_iter();
    match method {
        "push" => {
            list.borrow_mut().push(args.next().expect("arity checked"));
            Ok(Value::Null)
        }
        "size" => Ok(Value::Int(list.borrow().len() as i64)),
        "get" => {
            let l = list.borrow();
            let i = index_arg(&args.next().expect("arity checked"), l.len(), false)?;
            Ok(l[i].clone())
        }
        "set" => {
            let mut l = list.borrow_mut();
            let i = index_arg(&args.next().expect("arity checked"), l.len(), false)?;
            l[i] = args.next().expect("arity checked");
            Ok(Value::Null)
        }
        "remove_at" => {
            let mut l = list.borrow_mut();
            let i = index_arg(&args.next().expect("arity checked"), l.len(), false)?;
            Ok(l.remove(i))
        }
        _ => unreachable!(),
    }
}

fn binary(op: BinaryOp, l: Value, r: Value) -> EvalResult<Value> {
    use BinaryOp::*;
    let overflow = || fault("integer overflow");
    Ok(match (op, l, r) {
        (Eq, l, r) => Value::Bool(l == r),
        (Ne, l, r) => Value::Bool(l != r),
        (Add, Value::Str(a), b) => Value::Str(Rc::from(format!("{a}{b}"))),
        (Add, a, Value::Str(b)) => Value::Str(Rc::from(format!("{a}{b}"))),
        (op, Value::Int(a), Value::Int(b)) => match op {
            Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
            Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
            Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
            Div | Rem if b == 0 => return Err(fault("division by zero")),
            Div => Value::Int(a.checked_div(b).ok_or_else(overflow)?),
            Rem => Value::Int(a.checked_rem(b).ok_or_else(overflow)?),
            Lt => Value::Bool(a < b),
            Le => Value::Bool(a <= b),
            Gt => Value::Bool(a > b),
            Ge => Value::Bool(a >= b),
            And | Or | Eq | Ne => unreachable!("handled above"),
        },
        (op, l, r) => {
            return Err(fault(format!(
                "operator '{}' not defined for {} and {}",
                op.symbol(),
                l.type_name(),
                r.type_name()
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::emit;
    use crate::pipeline::compile_sources;

    fn run(src: &str) -> RunOutcome {
        let core = compile_sources(&[("t.eco".to_string(), src.to_string())]).expect("compiles");
        run_program(&emit(&core), "main", DEFAULT_MAX_STEPS)
    }

    #[test]
    fn prints_ok() {
        let out = run("class Main { static method main() { print(\"ok\"); } }");
        assert_eq!(out, RunOutcome { exit_code: 0, stdout: "ok\n".into(), stderr: String::new() });
    }

    #[test]
    fn list_size_and_catch() {
        let out = run(
            "class Main { static method main() { print([1, 2].size()); try { throw \"x\"; } catch (m) { print(m); } } }",
        );
        assert_eq!(out.stdout, "2\nx\n");
        assert_eq!(out.exit_code, 0);
    }

    #[test]
    fn uncaught_throw_exits_1() {
        let out = run("class Main { static method main() { print(1); throw \"boom\"; } }");
        assert_eq!(out.exit_code, 1);
        assert_eq!(out.stdout, "1\n");
        assert!(out.stderr.contains("boom"));
    }

    #[test]
    fn dead_object_method_call() {
        let out = run(
            "class A { method f() { return 1; } }\nclass Main { static method main() { var a = new A(); delete a; a.f(); } }",
        );
        assert_eq!(out.exit_code, 2);
        assert!(out.stderr.contains("runtime error[R104]"), "{}", out.stderr);
    }

    #[test]
    fn arithmetic_faults() {
        for body in ["print(1 / 0);", "print(9223372036854775807 + 1);", "print([1][3]);", "print(1 + true);"] {
            let out = run(&format!("class Main {{ static method main() {{ {body} }} }}"));
            assert_eq!(out.exit_code, 2, "{body}");
            assert!(out.stderr.contains("R104"), "{body}: {}", out.stderr);
        }
    }

    #[test]
    fn step_budget() {
        let core = compile_sources(&[(
            "t.eco".into(),
            "class Main { static method main() { while (true) { } } }".into(),
        )])
        .unwrap();
        let out = run_program(&emit(&core), "main", 1000);
        assert_eq!(out.exit_code, 2);
        assert!(out.stderr.contains("R104") && out.stderr.contains("step budget"));
    }

    #[test]
    fn string_concat_and_equality() {
        let out = run(
            "class Main { static method main() { var l = [1]; print(\"n=\" + 3 + \",\" + (l == l) + \",\" + ([1] == [1])); } }",
        );
        assert_eq!(out.stdout, "n=3,true,false\n");
    }

    #[test]
    fn private_ctor_only_from_own_class() {
        let src = "class P { private constructor(x) { } static method Make(x) { return new P(x); } }\n\
                   class Main { static method main() { P.Make(1); print(\"made\"); new P(1); } }";
        let out = run(src);
        assert_eq!(out.stdout, "made\n");
        assert_eq!(out.exit_code, 2);
        assert!(out.stderr.contains("private"));
    }

    #[test]
    fn inheritance_and_fields() {
        let src = "class A { var x; method get() { return this.x; } }\n\
                   class B extends A { var y; constructor() { this.x = 4; this.y = 5; } method sum() { return this.get() + this.y; } }\n\
                   class Main { static method main() { print(new B().sum()); } }";
        assert_eq!(run(src).stdout, "9\n");
    }

    #[test]
    fn runaway_recursion_is_runtime_error() {
        let src = "class Main { static method f(n) { return Main.f(n + 1); } static method main() { Main.f(0); } }";
        let out = std::thread::Builder::new()
            .stack_size(64 << 20)
            .spawn(move || run(src))
            .unwrap()
            .join()
            .unwrap();
        assert_eq!(out.exit_code, 2);
        assert!(out.stderr.contains("call depth"));
    }
}
