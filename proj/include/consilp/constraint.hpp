#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "consilp/model.hpp"

namespace consilp {

// ---------------------------------------------------------------------------
// AST (parsed, possibly templated over a sequence index)

enum class StmtKind {
    ExactlyOne,
    AtMostOne,
    Or,
    Nand,
    Imply,
    Iff,
    ForbidSeq,
    Free, // annotation: suppress the implicit exactly-one for a group
};

const char* stmt_kind_name(StmtKind kind);

/// A (possibly negated) reference to one label of one group. A sequence
/// template reference "base[i]" / "base[i+1]" carries `offset` 0 / 1;
/// concrete references leave `offset` at -1 and name the group directly.
struct LabelRef {
    std::string group;
    std::string label;
    bool negated = false;
    int offset = -1;

    bool templated() const { return offset >= 0; }
};

struct Statement {
    StmtKind kind;
    int line = 0;
    // For ExactlyOne/Free: the group reference (templated allowed).
    std::string group_ref;
    int group_offset = -1;
    // For literal statements. Imply stores antecedents here.
    std::vector<LabelRef> literals;
    LabelRef consequent; // Imply only
    // ForbidSeq: base sequence name + the forbidden adjacent pair.
    std::string seq_base, seq_label_a, seq_label_b;
};

struct ConstraintAst {
    std::vector<Statement> statements;
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(std::string msg, int line_, int column_)
        : std::runtime_error(std::move(msg)), line(line_), column(column_) {}
};

/// Parses the line-oriented constraint DSL. '#' starts a comment; blank
/// lines are ignored. Throws ParseError with line/column on bad input.
///
///   exactly_one <group>
///   free <group>
///   at_most_one <lit> <lit> ...
///   or <lit> <lit> ...
///   nand <lit> <lit>
///   iff <lit> <lit>
///   imply <lit> [<lit> ...] -> <lit>
///   forbid_seq <seqbase> <labelA> <labelB>
///
/// lit := ['!'] group '.' label, where group may be templated as
/// name[i] or name[i+1] over a sequence of groups named "name[0]",
/// "name[1]", ...
ConstraintAst parse_constraints(const std::string& text);

// ---------------------------------------------------------------------------
// Grounding

struct GroundLit {
    std::string group;
    int label = 0;
    bool negated = false;
};

/// A statement instantiated against one instance. For Imply the literals
/// are the antecedents and the last element is the consequent.
struct GroundConstraint {
    StmtKind kind;
    std::vector<GroundLit> literals;
    int line = 0;
};

struct GroundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Expands templated statements over every valid sequence position,
/// grounds concrete statements once, and appends one implicit ExactlyOne
/// per group not annotated `free`. Throws GroundError on unknown group
/// or label names.
std::vector<GroundConstraint> ground(const ConstraintAst& ast, const Instance& instance);

/// Hierarchy constraints generated from the instance parent map:
/// child -> parent implications per edge, downward 'None' propagation,
/// and childless-parent -> 'None' implications where a 'None' label
/// exists on the next level.
std::vector<GroundConstraint> hierarchy_constraints(const Instance& instance);

/// One Nand per invalid adjacent action pair, for every consecutive pair
/// of groups named "<seq_base>[t]", "<seq_base>[t+1]".
std::vector<GroundConstraint> transition_constraints(const Instance& instance,
                                                     const TransitionMatrix& matrix,
                                                     const std::string& seq_base = "action");

// ---------------------------------------------------------------------------
// Linear compilation

enum class Comparator { LessEq, Eq, GreaterEq };

struct LinearTerm {
    std::string group;
    int label = 0;
    int coeff = 0;
};

struct LinearConstraint {
    std::vector<LinearTerm> terms;
    Comparator cmp = Comparator::LessEq;
    int rhs = 0;
};

/// Compiles each ground constraint to one linear constraint over 0/1
/// variables. Negated literals are folded into coefficients and the
/// right-hand side. Deterministic and order-preserving.
std::vector<LinearConstraint> compile_linear(const std::vector<GroundConstraint>& constraints);

// ---------------------------------------------------------------------------
// Satisfaction

struct SatisfactionReport {
    std::vector<bool> satisfied; // parallel to the constraint list
    int total = 0;
    int num_satisfied = 0;

    /// 100 * satisfied / total; an empty constraint list reports 100.
    double rate() const {
        return total == 0 ? 100.0 : 100.0 * num_satisfied / total;
    }
};

/// Evaluates each ground constraint logically against a complete
/// assignment. Throws GroundError if the assignment misses a referenced
/// group.
SatisfactionReport check_satisfaction(const Assignment& assignment,
                                      const std::vector<GroundConstraint>& constraints);

/// Truth of one ground literal under an assignment.
bool literal_holds(const GroundLit& lit, const Assignment& assignment);

/// Logical evaluation of a single ground constraint.
bool constraint_holds(const GroundConstraint& c, const Assignment& assignment);

/// Evaluation of the compiled linear form (used by agreement tests and
/// the solver contract).
bool linear_holds(const LinearConstraint& c, const Assignment& assignment);

/// The default action transition matrix over Create, Move, Exist,
/// Destroy, Prior, Post: Prior may only precede Prior/Create, Destroy
/// may only precede Post, Post only precedes Post, and the remaining
/// states move freely between Move/Exist/Destroy.
TransitionMatrix default_action_transitions();

} // namespace consilp
