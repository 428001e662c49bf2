use std::fmt;

/// A belief node of the structured query language.
///
/// `Term`, `OrderedWindow`, `UnorderedWindow` and `Syn` are proximity nodes:
/// they produce occurrence positions. `Combine` averages the scores of its
/// children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QueryNode {
    Term(String),
    Combine(Vec<QueryNode>),
    Syn(Vec<QueryNode>),
    OrderedWindow { width: u32, terms: Vec<String> },
    UnorderedWindow { width: u32, terms: Vec<String> },
}

impl QueryNode {
    pub fn term(t: impl Into<String>) -> Self {
        QueryNode::Term(t.into())
    }

    pub fn is_proximity(&self) -> bool {
        match self {
            QueryNode::Term(_)
            | QueryNode::OrderedWindow { .. }
            | QueryNode::UnorderedWindow { .. } => true,
            QueryNode::Syn(children) => children.iter().all(QueryNode::is_proximity),
            QueryNode::Combine(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterOp {
    Greater(i64),
    Less(i64),
    /// Inclusive on both ends.
    Between(i64, i64),
    Equals(i64),
}

impl FilterOp {
    pub fn name(&self) -> &'static str {
        match self {
            FilterOp::Greater(_) => "greater",
            FilterOp::Less(_) => "less",
            FilterOp::Between(..) => "between",
            FilterOp::Equals(_) => "equals",
        }
    }

    pub fn accepts(&self, value: i64) -> bool {
        match *self {
            FilterOp::Greater(b) => value > b,
            FilterOp::Less(b) => value < b,
            FilterOp::Between(lo, hi) => lo <= value && value <= hi,
            FilterOp::Equals(b) => value == b,
        }
    }
}

/// A top-level numeric restriction on a document field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumericFilter {
    pub field: String,
    pub op: FilterOp,
}

impl NumericFilter {
    /// A missing value fails every filter.
    pub fn accepts(&self, value: Option<i64>) -> bool {
        value.is_some_and(|v| self.op.accepts(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParsedQuery {
    pub belief: QueryNode,
    pub filters: Vec<NumericFilter>,
}

impl fmt::Display for QueryNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryNode::Term(t) => f.write_str(t),
            QueryNode::Combine(children) => write_op(f, "combine", children),
            QueryNode::Syn(children) => write_op(f, "syn", children),
            QueryNode::OrderedWindow { width, terms } => write_op(f, &format!("od{width}"), terms),
            QueryNode::UnorderedWindow { width, terms } => {
                write_op(f, &format!("uw{width}"), terms)
            }
        }
    }
}

fn write_op<T: fmt::Display>(f: &mut fmt::Formatter<'_>, name: &str, args: &[T]) -> fmt::Result {
    write!(f, "#{name}(")?;
    for a in args {
        write!(f, " {a}")?;
    }
    f.write_str(" )")
}

impl fmt::Display for NumericFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            FilterOp::Between(lo, hi) => write!(f, "#between( {} {lo} {hi} )", self.field),
            FilterOp::Greater(b) | FilterOp::Less(b) | FilterOp::Equals(b) => {
                write!(f, "#{}( {} {b} )", self.op.name(), self.field)
            }
        }
    }
}

impl fmt::Display for ParsedQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.belief)?;
        for filter in &self.filters {
            write!(f, " {filter}")?;
        }
        Ok(())
    }
}

/// Canonical text for a query: operators as `#name( arg arg )`, filters
/// appended after the belief.
pub fn render_query(belief: &QueryNode, filters: &[NumericFilter]) -> String {
    let mut out = belief.to_string();
    for filter in filters {
        out.push(' ');
        out.push_str(&filter.to_string());
    }
    out
}
