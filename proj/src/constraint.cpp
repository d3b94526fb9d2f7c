#include "consilp/constraint.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace consilp {

const char* stmt_kind_name(StmtKind kind) {
    switch (kind) {
    case StmtKind::ExactlyOne: return "exactly_one";
    case StmtKind::AtMostOne: return "at_most_one";
    case StmtKind::Or: return "or";
    case StmtKind::Nand: return "nand";
    case StmtKind::Imply: return "imply";
    case StmtKind::Iff: return "iff";
    case StmtKind::ForbidSeq: return "forbid_seq";
    case StmtKind::Free: return "free";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    std::string text;
    int column; // 1-based
};

std::vector<Token> tokenize_line(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            ++i;
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start + 1)});
    }
    return tokens;
}

// Splits a group reference, stripping a trailing [i] / [i+1] template.
void parse_group_ref(const Token& tok, const std::string& text, int line,
                     std::string& group, int& offset) {
    group = text;
    offset = -1;
    if (group.size() >= 3 && group.ends_with("[i]")) {
        group.resize(group.size() - 3);
        offset = 0;
    } else if (group.size() >= 5 && group.ends_with("[i+1]")) {
        group.resize(group.size() - 5);
        offset = 1;
    }
    if (group.empty())
        throw ParseError("empty group reference", line, tok.column);
}

LabelRef parse_literal(const Token& tok, int line) {
    LabelRef ref;
    std::string text = tok.text;
    if (!text.empty() && text[0] == '!') {
        ref.negated = true;
        text.erase(0, 1);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size())
        throw ParseError("expected <group>.<label>, got '" + tok.text + "'", line,
                         tok.column);
    parse_group_ref(tok, text.substr(0, dot), line, ref.group, ref.offset);
    ref.label = text.substr(dot + 1);
    return ref;
}

} // namespace

ConstraintAst parse_constraints(const std::string& text) {
    ConstraintAst ast;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = tokenize_line(line);
        if (tokens.empty()) continue;

        Statement st;
        st.line = lineno;
        const std::string& kw = tokens[0].text;
        auto require_args = [&](std::size_t min_count) {
            if (tokens.size() - 1 < min_count)
                throw ParseError("'" + kw + "' needs at least " +
                                     std::to_string(min_count) + " argument(s)",
                                 lineno, tokens[0].column);
        };
        auto literals_from = [&](std::size_t first, std::size_t last) {
            for (std::size_t i = first; i < last; ++i)
                st.literals.push_back(parse_literal(tokens[i], lineno));
        };

        if (kw == "exactly_one" || kw == "free") {
            st.kind = kw == "free" ? StmtKind::Free : StmtKind::ExactlyOne;
            require_args(1);
            if (tokens.size() != 2)
                throw ParseError("'" + kw + "' takes one group", lineno,
                                 tokens[2].column);
            parse_group_ref(tokens[1], tokens[1].text, lineno, st.group_ref,
                            st.group_offset);
        } else if (kw == "at_most_one" || kw == "or") {
            st.kind = kw == "or" ? StmtKind::Or : StmtKind::AtMostOne;
            require_args(1);
            literals_from(1, tokens.size());
        } else if (kw == "nand" || kw == "iff") {
            st.kind = kw == "nand" ? StmtKind::Nand : StmtKind::Iff;
            require_args(2);
            if (tokens.size() != 3)
                throw ParseError("'" + kw + "' takes exactly two literals", lineno,
                                 tokens[3].column);
            literals_from(1, 3);
        } else if (kw == "imply") {
            st.kind = StmtKind::Imply;
            require_args(3);
            std::size_t arrow = 0;
            for (std::size_t i = 1; i < tokens.size(); ++i)
                if (tokens[i].text == "->") arrow = i;
            if (arrow < 2 || arrow + 2 != tokens.size())
                throw ParseError("'imply' expects <lit>... -> <lit>", lineno,
                                 tokens[0].column);
            literals_from(1, arrow);
            st.consequent = parse_literal(tokens[arrow + 1], lineno);
        } else if (kw == "forbid_seq") {
            st.kind = StmtKind::ForbidSeq;
            require_args(3);
            if (tokens.size() != 4)
                throw ParseError("'forbid_seq' takes <seq> <labelA> <labelB>", lineno,
                                 tokens[0].column);
            st.seq_base = tokens[1].text;
            st.seq_label_a = tokens[2].text;
            st.seq_label_b = tokens[3].text;
        } else {
            throw ParseError("unknown statement keyword '" + kw + "'", lineno,
                             tokens[0].column);
        }
        ast.statements.push_back(std::move(st));
    }
    return ast;
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

std::string seq_group_id(const std::string& base, int t) {
    return base + "[" + std::to_string(t) + "]";
}

// Sequence positions t (ascending) for which "base[t]" exists.
std::vector<int> seq_positions(const Instance& inst, const std::string& base) {
    std::vector<int> ts;
    for (const auto& g : inst.groups) {
        if (!g.id.starts_with(base) || g.id.size() <= base.size() + 2) continue;
        if (g.id[base.size()] != '[' || g.id.back() != ']') continue;
        ts.push_back(std::stoi(g.id.substr(base.size() + 1,
                                           g.id.size() - base.size() - 2)));
    }
    std::sort(ts.begin(), ts.end());
    return ts;
}

GroundLit resolve(const LabelRef& ref, const Instance& inst, int t, int line) {
    std::string gid = ref.templated() ? seq_group_id(ref.group, t + ref.offset)
                                      : ref.group;
    const auto* g = inst.find_group(gid);
    if (!g)
        throw GroundError("line " + std::to_string(line) + ": unknown group '" +
                          gid + "' in instance '" + inst.id + "'");
    int idx = g->label_index(ref.label);
    if (idx < 0)
        throw GroundError("line " + std::to_string(line) + ": group '" + gid +
                          "' has no label '" + ref.label + "'");
    return {gid, idx, ref.negated};
}

GroundConstraint ground_exactly_one(const DecisionGroup& g, int line) {
    GroundConstraint gc;
    gc.kind = StmtKind::ExactlyOne;
    gc.line = line;
    for (int i = 0; i < static_cast<int>(g.size()); ++i)
        gc.literals.push_back({g.id, i, false});
    return gc;
}

// Template positions valid for a statement: every referenced offset must
// resolve to an existing group.
std::vector<int> template_positions(const Statement& st, const Instance& inst) {
    std::string base;
    int max_offset = 0;
    auto visit = [&](const std::string& g, int off) {
        if (off < 0) return;
        base = g;
        max_offset = std::max(max_offset, off);
    };
    for (const auto& l : st.literals) visit(l.group, l.offset);
    if (st.kind == StmtKind::Imply) visit(st.consequent.group, st.consequent.offset);
    visit(st.group_ref, st.group_offset);

    std::vector<int> out;
    if (base.empty()) return out;
    std::set<int> ts;
    for (int t : seq_positions(inst, base)) ts.insert(t);
    for (int t : ts)
        if (ts.count(t + max_offset)) out.push_back(t);
    return out;
}

bool statement_templated(const Statement& st) {
    if (st.group_offset >= 0) return true;
    if (st.kind == StmtKind::Imply && st.consequent.templated()) return true;
    for (const auto& l : st.literals)
        if (l.templated()) return true;
    return false;
}

void ground_statement(const Statement& st, const Instance& inst, int t,
                      std::vector<GroundConstraint>& out) {
    if (st.kind == StmtKind::ExactlyOne) {
        std::string gid = st.group_offset >= 0 ? seq_group_id(st.group_ref, t + st.group_offset)
                                               : st.group_ref;
        const auto* g = inst.find_group(gid);
        if (!g)
            throw GroundError("line " + std::to_string(st.line) +
                              ": unknown group '" + gid + "'");
        out.push_back(ground_exactly_one(*g, st.line));
        return;
    }
    GroundConstraint gc;
    gc.kind = st.kind;
    gc.line = st.line;
    for (const auto& l : st.literals) gc.literals.push_back(resolve(l, inst, t, st.line));
    if (st.kind == StmtKind::Imply)
        gc.literals.push_back(resolve(st.consequent, inst, t, st.line));
    out.push_back(std::move(gc));
}

} // namespace

std::vector<GroundConstraint> ground(const ConstraintAst& ast, const Instance& instance) {
    std::vector<GroundConstraint> out;
    std::set<std::string> exempt; // groups covered by `free` or explicit exactly_one

    for (const auto& st : ast.statements) {
        if (st.kind == StmtKind::Free || st.kind == StmtKind::ExactlyOne) {
            if (st.group_offset >= 0) {
                for (int t : seq_positions(instance, st.group_ref))
                    exempt.insert(seq_group_id(st.group_ref, t));
            } else {
                exempt.insert(st.group_ref);
            }
        }
        if (st.kind == StmtKind::Free) continue;

        if (st.kind == StmtKind::ForbidSeq) {
            auto ts = seq_positions(instance, st.seq_base);
            std::set<int> present(ts.begin(), ts.end());
            for (int t : ts) {
                if (!present.count(t + 1)) continue;
                GroundConstraint gc;
                gc.kind = StmtKind::Nand;
                gc.line = st.line;
                LabelRef a{st.seq_base, st.seq_label_a, false, 0};
                LabelRef b{st.seq_base, st.seq_label_b, false, 1};
                gc.literals.push_back(resolve(a, instance, t, st.line));
                gc.literals.push_back(resolve(b, instance, t, st.line));
                out.push_back(std::move(gc));
            }
            continue;
        }

        if (statement_templated(st)) {
            for (int t : template_positions(st, instance))
                ground_statement(st, instance, t, out);
        } else {
            ground_statement(st, instance, 0, out);
        }
    }

    // Implicit mutual exclusivity for every group not annotated free and
    // not already carrying an explicit exactly_one.
    for (const auto& g : instance.groups)
        if (!exempt.count(g.id)) out.push_back(ground_exactly_one(g, 0));
    return out;
}

std::vector<GroundConstraint> hierarchy_constraints(const Instance& instance) {
    std::vector<GroundConstraint> out;
    std::vector<const DecisionGroup*> levels;
    for (const auto& g : instance.groups)
        if (g.level) levels.push_back(&g);
    std::sort(levels.begin(), levels.end(),
              [](const auto* a, const auto* b) { return *a->level < *b->level; });

    auto imply = [&](const std::string& ga, int la, const std::string& gb, int lb) {
        GroundConstraint gc;
        gc.kind = StmtKind::Imply;
        gc.literals = {{ga, la, false}, {gb, lb, false}};
        out.push_back(std::move(gc));
    };

    for (std::size_t k = 1; k < levels.size(); ++k) {
        const auto& child_g = *levels[k];
        const auto& parent_g = *levels[k - 1];
        for (int i = 0; i < static_cast<int>(child_g.size()); ++i) {
            if (child_g.none_index && *child_g.none_index == i) continue;
            auto it = instance.parent.find(child_g.labels[i]);
            if (it == instance.parent.end()) continue;
            int pidx = parent_g.label_index(it->second);
            if (pidx < 0)
                throw GroundError("hierarchy: parent '" + it->second +
                                  "' of '" + child_g.labels[i] +
                                  "' is not a label of group '" + parent_g.id + "'");
            imply(child_g.id, i, parent_g.id, pidx);
        }
        if (!child_g.none_index) continue;
        int child_none = *child_g.none_index;
        // 'None' propagates downward.
        if (parent_g.none_index)
            imply(parent_g.id, *parent_g.none_index, child_g.id, child_none);
        // A parent with no children on the next level forces 'None' there.
        for (int p = 0; p < static_cast<int>(parent_g.size()); ++p) {
            if (parent_g.none_index && *parent_g.none_index == p) continue;
            bool has_child = false;
            for (int i = 0; i < static_cast<int>(child_g.size()); ++i) {
                auto it = instance.parent.find(child_g.labels[i]);
                if (it != instance.parent.end() && it->second == parent_g.labels[p])
                    has_child = true;
            }
            if (!has_child) imply(parent_g.id, p, child_g.id, child_none);
        }
    }
    return out;
}

std::vector<GroundConstraint> transition_constraints(const Instance& instance,
                                                     const TransitionMatrix& matrix,
                                                     const std::string& seq_base) {
    std::vector<GroundConstraint> out;
    auto ts = seq_positions(instance, seq_base);
    std::set<int> present(ts.begin(), ts.end());
    for (int t : ts) {
        if (!present.count(t + 1)) continue;
        const auto* a = instance.find_group(seq_group_id(seq_base, t));
        const auto* b = instance.find_group(seq_group_id(seq_base, t + 1));
        for (std::size_t i = 0; i < matrix.labels.size(); ++i) {
            for (std::size_t j = 0; j < matrix.labels.size(); ++j) {
                if (matrix.valid[i][j]) continue;
                int ia = a->label_index(matrix.labels[i]);
                int ib = b->label_index(matrix.labels[j]);
                if (ia < 0 || ib < 0)
                    throw GroundError("transition matrix label missing from group '" +
                                      a->id + "'");
                GroundConstraint gc;
                gc.kind = StmtKind::Nand;
                gc.literals = {{a->id, ia, false}, {b->id, ib, false}};
                out.push_back(std::move(gc));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear compilation

namespace {

// Adds `sign * lit` to the running sum, folding a negated literal
// 1 - y into the coefficient and right-hand side.
void add_literal(LinearConstraint& lc, const GroundLit& lit, int sign) {
    if (lit.negated) {
        lc.rhs -= sign;
        sign = -sign;
    }
    for (auto& t : lc.terms) {
        if (t.group == lit.group && t.label == lit.label) {
            t.coeff += sign;
            return;
        }
    }
    lc.terms.push_back({lit.group, lit.label, sign});
}

void drop_zero_terms(LinearConstraint& lc) {
    std::erase_if(lc.terms, [](const LinearTerm& t) { return t.coeff == 0; });
}

} // namespace

std::vector<LinearConstraint> compile_linear(
    const std::vector<GroundConstraint>& constraints) {
    std::vector<LinearConstraint> out;
    out.reserve(constraints.size());
    for (const auto& gc : constraints) {
        LinearConstraint lc;
        switch (gc.kind) {
        case StmtKind::ExactlyOne:
            lc.cmp = Comparator::Eq;
            lc.rhs = 1;
            for (const auto& l : gc.literals) add_literal(lc, l, 1);
            break;
        case StmtKind::AtMostOne:
        case StmtKind::Nand:
            lc.cmp = Comparator::LessEq;
            lc.rhs = 1;
            for (const auto& l : gc.literals) add_literal(lc, l, 1);
            break;
        case StmtKind::Or:
            lc.cmp = Comparator::GreaterEq;
            lc.rhs = 1;
            for (const auto& l : gc.literals) add_literal(lc, l, 1);
            break;
        case StmtKind::Imply: {
            lc.cmp = Comparator::LessEq;
            lc.rhs = static_cast<int>(gc.literals.size()) - 2;
            for (std::size_t i = 0; i + 1 < gc.literals.size(); ++i)
                add_literal(lc, gc.literals[i], 1);
            add_literal(lc, gc.literals.back(), -1);
            break;
        }
        case StmtKind::Iff:
            lc.cmp = Comparator::Eq;
            lc.rhs = 0;
            add_literal(lc, gc.literals[0], 1);
            add_literal(lc, gc.literals[1], -1);
            break;
        case StmtKind::ForbidSeq:
        case StmtKind::Free:
            throw GroundError("cannot compile an ungrounded statement kind");
        }
        drop_zero_terms(lc);
        out.push_back(std::move(lc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Satisfaction

bool literal_holds(const GroundLit& lit, const Assignment& assignment) {
    auto it = assignment.choice.find(lit.group);
    if (it == assignment.choice.end())
        throw GroundError("assignment missing group '" + lit.group + "'");
    bool v = it->second == lit.label;
    return lit.negated ? !v : v;
}

bool constraint_holds(const GroundConstraint& c, const Assignment& assignment) {
    auto count_true = [&] {
        int n = 0;
        for (const auto& l : c.literals)
            if (literal_holds(l, assignment)) ++n;
        return n;
    };
    switch (c.kind) {
    case StmtKind::ExactlyOne: return count_true() == 1;
    case StmtKind::AtMostOne: return count_true() <= 1;
    case StmtKind::Or: return count_true() >= 1;
    case StmtKind::Nand:
        return !(literal_holds(c.literals[0], assignment) &&
                 literal_holds(c.literals[1], assignment));
    case StmtKind::Imply: {
        for (std::size_t i = 0; i + 1 < c.literals.size(); ++i)
            if (!literal_holds(c.literals[i], assignment)) return true;
        return literal_holds(c.literals.back(), assignment);
    }
    case StmtKind::Iff:
        return literal_holds(c.literals[0], assignment) ==
               literal_holds(c.literals[1], assignment);
    case StmtKind::ForbidSeq:
    case StmtKind::Free:
        throw GroundError("cannot evaluate an ungrounded statement kind");
    }
    return false;
}

bool linear_holds(const LinearConstraint& c, const Assignment& assignment) {
    int lhs = 0;
    for (const auto& t : c.terms) {
        auto it = assignment.choice.find(t.group);
        if (it == assignment.choice.end())
            throw GroundError("assignment missing group '" + t.group + "'");
        if (it->second == t.label) lhs += t.coeff;
    }
    switch (c.cmp) {
    case Comparator::LessEq: return lhs <= c.rhs;
    case Comparator::Eq: return lhs == c.rhs;
    case Comparator::GreaterEq: return lhs >= c.rhs;
    }
    return false;
}

SatisfactionReport check_satisfaction(const Assignment& assignment,
                                      const std::vector<GroundConstraint>& constraints) {
    SatisfactionReport report;
    report.total = static_cast<int>(constraints.size());
    report.satisfied.reserve(constraints.size());
    for (const auto& c : constraints) {
        bool ok = constraint_holds(c, assignment);
        report.satisfied.push_back(ok);
        if (ok) ++report.num_satisfied;
    }
    return report;
}

TransitionMatrix default_action_transitions() {
    TransitionMatrix m;
    m.labels = {"Create", "Move", "Exist", "Destroy", "Prior", "Post"};
    auto idx = [&](const char* name) { return m.label_index(name); };
    m.valid.assign(6, std::vector<bool>(6, false));
    auto allow = [&](const char* a, std::initializer_list<const char*> succ) {
        for (const char* b : succ) m.valid[idx(a)][idx(b)] = true;
    };
    allow("Create", {"Move", "Exist", "Destroy"});
    allow("Move", {"Move", "Exist", "Destroy"});
    allow("Exist", {"Move", "Exist", "Destroy"});
    allow("Destroy", {"Post"});
    allow("Prior", {"Prior", "Create"});
    allow("Post", {"Post"});
    return m;
}

} // namespace consilp
