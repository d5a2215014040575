#include "grafcet/analyzer.hpp"

#include <algorithm>
#include <functional>

#include "grafcet/dsl.hpp"

namespace grafcet {

const char* to_string(AnalysisErrorKind kind) {
  switch (kind) {
    case AnalysisErrorKind::missing_expansion: return "MissingExpansion";
    case AnalysisErrorKind::recursive_macro: return "RecursiveMacro";
    case AnalysisErrorKind::entry_exit_violation: return "EntryExitViolation";
    case AnalysisErrorKind::source_sink_in_expansion: return "SourceSinkInExpansion";
    case AnalysisErrorKind::hierarchy_cycle: return "HierarchyCycle";
    case AnalysisErrorKind::self_force: return "SelfForce";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Macro expansion

namespace {

bool starts_with(const std::string& s, char c) { return !s.empty() && s[0] == c; }

struct ExpandedChart {
  std::vector<Step> steps;
  std::vector<Transition> transitions;
};

class MacroExpander {
 public:
  MacroExpander(const GrafcetModel& model, std::vector<Diagnostic>* warnings)
      : model_(model), warnings_(warnings) {}

  ExpandedChart expand(const std::vector<Step>& steps, const std::vector<Transition>& transitions,
                       const std::string& prefix, std::vector<std::string>& stack) {
    std::set<std::string> local;
    for (const auto& s : steps) local.insert(s.id);
    auto rename = [&](const std::string& id) { return local.count(id) ? prefix + id : id; };
    auto rename_expr = [&](const Expression& e) {
      return e.rewrite_leaves([&](const Expression& leaf) -> std::optional<Expression> {
        if (leaf.op() == Expression::Op::step_activity && local.count(leaf.identifier())) {
          return Expression::step_activity(prefix + leaf.identifier());
        }
        return std::nullopt;
      });
    };

    ExpandedChart out;
    std::map<std::string, std::string> entry_of;               // macro id -> entry id
    std::map<std::string, std::vector<std::string>> exits_of;  // macro id -> exit ids

    for (const auto& s : steps) {
      if (s.kind != StepKind::macro) {
        Step copy = s;
        copy.id = prefix + s.id;
        if (copy.kind == StepKind::entry || copy.kind == StepKind::exit) copy.kind = StepKind::normal;
        for (auto& a : copy.actions) {
          if (a.condition) a.condition = rename_expr(*a.condition);
          if (a.value) a.value = rename_expr(*a.value);
        }
        for (auto& f : copy.forcings) f.owner = copy.id;
        out.steps.push_back(std::move(copy));
        continue;
      }
      const Expansion* exp = model_.find_expansion(s.id);
      if (!exp) {
        throw AnalysisError(AnalysisErrorKind::missing_expansion,
                            "macro step '" + prefix + s.id + "' has no expansion chart",
                            s.origin.span);
      }
      if (std::find(stack.begin(), stack.end(), s.id) != stack.end()) {
        std::string chain;
        for (const auto& m : stack) chain += m + " -> ";
        throw AnalysisError(AnalysisErrorKind::recursive_macro,
                            "recursive macro expansion: " + chain + s.id, s.origin.span);
      }
      check_expansion(*exp);

      const std::string inner_prefix = prefix + s.id + ".";
      stack.push_back(s.id);
      ExpandedChart inner = expand(exp->steps, exp->transitions, inner_prefix, stack);
      stack.pop_back();

      for (const auto& es : exp->steps) {
        if (es.kind == StepKind::entry) entry_of[s.id] = inner_prefix + es.id;
        if (es.kind == StepKind::exit) exits_of[s.id].push_back(inner_prefix + es.id);
      }
      for (auto& st : inner.steps) out.steps.push_back(std::move(st));
      for (auto& tr : inner.transitions) out.transitions.push_back(std::move(tr));
    }

    for (const auto& t : transitions) {
      Transition copy = t;
      copy.id = prefix + t.id;
      copy.pre.clear();
      copy.post.clear();
      for (const auto& id : t.pre) {
        if (auto it = exits_of.find(id); it != exits_of.end()) {
          for (const auto& x : it->second) copy.pre.push_back(x);
        } else {
          copy.pre.push_back(rename(id));
        }
      }
      for (const auto& id : t.post) {
        if (auto it = entry_of.find(id); it != entry_of.end()) {
          copy.post.push_back(it->second);
        } else {
          copy.post.push_back(rename(id));
        }
      }
      copy.condition = rename_expr(t.condition);
      out.transitions.push_back(std::move(copy));
    }
    return out;
  }

 private:
  void check_expansion(const Expansion& exp) {
    int entries = 0;
    int exits = 0;
    std::set<std::string> exit_ids;
    for (const auto& s : exp.steps) {
      if (s.kind == StepKind::entry) ++entries;
      if (s.kind == StepKind::exit) {
        ++exits;
        exit_ids.insert(s.id);
      }
      if (s.kind == StepKind::macro && (starts_with(s.id, 'E') || starts_with(s.id, 'S'))) {
        throw AnalysisError(AnalysisErrorKind::entry_exit_violation,
                            "entry/exit step '" + s.id + "' of expansion '" + exp.macro +
                                "' cannot be a macro step",
                            s.origin.span);
      }
    }
    if (entries != 1) {
      throw AnalysisError(AnalysisErrorKind::entry_exit_violation,
                          "expansion '" + exp.macro + "' needs exactly one entry step (found " +
                              std::to_string(entries) + ")",
                          exp.origin.span);
    }
    if (exits < 1) {
      throw AnalysisError(AnalysisErrorKind::entry_exit_violation,
                          "expansion '" + exp.macro + "' needs at least one exit step",
                          exp.origin.span);
    }
    for (const auto& t : exp.transitions) {
      if (t.pre.empty() || t.post.empty()) {
        throw AnalysisError(AnalysisErrorKind::source_sink_in_expansion,
                            std::string(t.pre.empty() ? "source" : "sink") + " transition '" +
                                t.id + "' inside expansion '" + exp.macro + "'",
                            t.origin.span);
      }
      bool activates_exit = false;
      bool activates_other = false;
      for (const auto& id : t.post) (exit_ids.count(id) ? activates_exit : activates_other) = true;
      if (warnings_ && activates_exit && activates_other && !warned_.count(exp.macro)) {
        warned_.insert(exp.macro);
        warnings_->push_back(
            {Severity::warning,
             "expansion '" + exp.macro + "': transition '" + t.id +
                 "' activates an exit step in parallel with other steps; those steps stay "
                 "active after the macro step is left",
             t.origin.span});
      }
    }
  }

  const GrafcetModel& model_;
  std::vector<Diagnostic>* warnings_;
  std::set<std::string> warned_;
};

}  // namespace

GrafcetModel expand_macros(const GrafcetModel& model, std::vector<Diagnostic>* warnings) {
  GrafcetModel result = model;
  result.expansions.clear();
  MacroExpander expander(model, warnings);
  for (auto& pg : result.partials) {
    std::vector<std::string> stack;
    ExpandedChart chart = expander.expand(pg.steps, pg.transitions, "", stack);
    pg.steps = std::move(chart.steps);
    pg.transitions = std::move(chart.transitions);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Hierarchy

HierarchyGraph compute_hierarchy(const GrafcetModel& model) {
  HierarchyGraph graph;
  for (const auto& pg : model.partials) graph.nodes.push_back(pg.id);

  for (const auto& pg : model.partials) {
    for (const auto& s : pg.steps) {
      for (const auto& f : s.forcings) {
        if (f.target == pg.id) {
          throw AnalysisError(AnalysisErrorKind::self_force,
                              "step '" + s.id + "' forces its own partial Grafcet '" + pg.id + "'",
                              f.origin.span);
        }
        graph.edges.insert({pg.id, f.target, HierarchyReason::forcing});
      }
      for (const auto& e : s.encloses) graph.edges.insert({pg.id, e, HierarchyReason::enclosing});
    }
  }

  std::map<std::string, std::vector<std::string>> successors;
  std::map<std::string, std::vector<std::string>> predecessors;
  for (const auto& e : graph.edges) {
    auto& succ = successors[e.superior];
    if (std::find(succ.begin(), succ.end(), e.inferior) == succ.end()) succ.push_back(e.inferior);
    auto& pred = predecessors[e.inferior];
    if (std::find(pred.begin(), pred.end(), e.superior) == pred.end()) pred.push_back(e.superior);
  }

  // Cycle search in declaration order so the reported cycle is deterministic.
  enum class Mark { none, open, done };
  std::map<std::string, Mark> mark;
  std::vector<std::string> path;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    mark[node] = Mark::open;
    path.push_back(node);
    for (const auto& next : successors[node]) {
      if (mark[next] == Mark::open) {
        auto from = std::find(path.begin(), path.end(), next);
        std::string cycle;
        for (auto it = from; it != path.end(); ++it) cycle += *it + " -> ";
        cycle += next;
        throw AnalysisError(AnalysisErrorKind::hierarchy_cycle, "hierarchy cycle: " + cycle,
                            model.find_partial(next)->origin.span);
      }
      if (mark[next] == Mark::none) visit(next);
    }
    path.pop_back();
    mark[node] = Mark::done;
  };
  for (const auto& n : graph.nodes) {
    if (mark[n] == Mark::none) visit(n);
  }

  std::function<int(const std::string&)> depth = [&](const std::string& node) -> int {
    if (auto it = graph.depth.find(node); it != graph.depth.end()) return it->second;
    int d = 0;
    for (const auto& sup : predecessors[node]) d = std::max(d, depth(sup) + 1);
    graph.depth[node] = d;
    return d;
  };
  for (const auto& n : graph.nodes) depth(n);
  return graph;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_reads(const Expression& e, std::set<std::string>& out) {
  e.for_each([&](const Expression& node) {
    if (node.op() == Expression::Op::variable) out.insert(node.identifier());
  });
}

bool expansion_free(const PartialGrafcet& pg) {
  return std::none_of(pg.steps.begin(), pg.steps.end(),
                      [](const Step& s) { return s.kind == StepKind::macro; });
}

}  // namespace

std::vector<Diagnostic> validate(const GrafcetModel& model) {
  std::vector<Diagnostic> diags;
  auto error = [&](std::string msg, const SourceSpan& span) {
    diags.push_back({Severity::error, std::move(msg), span});
  };
  auto warning = [&](std::string msg, const SourceSpan& span) {
    diags.push_back({Severity::warning, std::move(msg), span});
  };

  // Enclosure bookkeeping: partial -> steps listing it.
  std::map<std::string, std::vector<const Step*>> enclosers;
  for (const auto& pg : model.partials) {
    for (const auto& s : pg.steps) {
      for (const auto& e : s.encloses) enclosers[e].push_back(&s);
    }
  }

  std::set<std::string> continuous_targets;
  std::set<std::string> stored_targets;

  for (const auto& pg : model.partials) {
    const bool enclosed = pg.enclosed_by.has_value() || enclosers.count(pg.id);

    if (!expansion_free(pg)) {
      error("partial Grafcet '" + pg.id + "' still contains macro steps; expand it first",
            pg.origin.span);
    }

    // (d) one enclosing step per enclosed partial Grafcet
    if (auto it = enclosers.find(pg.id); it != enclosers.end() && it->second.size() > 1) {
      std::string names;
      for (const Step* s : it->second) names += (names.empty() ? "" : ", ") + s->id;
      error("partial Grafcet '" + pg.id + "' is enclosed by more than one step (" + names + ")",
            pg.origin.span);
    }
    // (c) enclosedBy must be listed by the enclosing step
    if (pg.enclosed_by) {
      const Step* encloser = model.find_step(*pg.enclosed_by);
      const bool lists = encloser && encloser->kind == StepKind::enclosing &&
                         std::find(encloser->encloses.begin(), encloser->encloses.end(), pg.id) !=
                             encloser->encloses.end();
      if (!lists) {
        error("partial Grafcet '" + pg.id + "' names '" + *pg.enclosed_by +
                  "' as its enclosing step, but that step does not enclose it",
              pg.origin.span);
      }
    }

    bool has_link = false;
    std::set<std::string> incident;
    for (const auto& t : pg.transitions) {
      for (const auto& id : t.pre) incident.insert(id);
      for (const auto& id : t.post) incident.insert(id);
      if (t.pre.empty() || t.post.empty()) {
        const char* what = t.pre.empty() ? "source" : "sink";
        if (enclosed) {
          // (a)
          error("enclosed partial Grafcet '" + pg.id + "' contains " + what + " transition '" +
                    t.id + "'; it could activate or empty the enclosed chart on its own",
                t.origin.span);
        } else {
          error(std::string(what) + " transition '" + t.id + "' is not supported", t.origin.span);
        }
      }
    }

    for (const auto& s : pg.steps) {
      if (s.activation_link) {
        has_link = true;
        if (!enclosed) {
          error("step '" + s.id + "' carries an activation link but '" + pg.id +
                    "' is not enclosed",
                s.origin.span);
        }
      }
      // (g)
      if (!incident.count(s.id)) warning("isolated element: step '" + s.id + "' has no transition", s.origin.span);
      // (h)
      if (enclosed && s.initial) {
        warning("initial step '" + s.id + "' inside enclosed partial Grafcet '" + pg.id +
                    "' is active while its enclosing step may not be",
                s.origin.span);
      }
      for (const auto& f : s.forcings) {
        const PartialGrafcet* target = model.find_partial(f.target);
        if (!target) {
          error("forcing order targets unknown partial Grafcet '" + f.target + "'", f.origin.span);
          continue;
        }
        for (const auto& id : f.spec.steps) {
          if (model.partial_of_step(id) != target) {
            error("forcing order of step '" + s.id + "': step '" + id + "' is not part of '" +
                      f.target + "'",
                  f.origin.span);
          }
        }
      }
      for (const auto& a : s.actions) {
        (a.kind == ActionKind::continuous ? continuous_targets : stored_targets).insert(a.target);
      }
    }
    // (b)
    if (enclosed && !has_link) {
      error("enclosed partial Grafcet '" + pg.id +
                "' has no activation-link step (mark one with '*')",
            pg.origin.span);
    }
  }

  // (e) outputs are never read
  auto check_reads = [&](const Expression& e, const SourceSpan& span) {
    std::set<std::string> reads;
    collect_reads(e, reads);
    for (const auto& r : reads) {
      const VariableDecl* v = model.find_variable(r);
      if (v && v->role == VariableRole::output) {
        error("expression reads output variable '" + r + "'", span);
      }
    }
  };
  for (const auto& pg : model.partials) {
    for (const auto& t : pg.transitions) check_reads(t.condition, t.origin.span);
    for (const auto& s : pg.steps) {
      for (const auto& a : s.actions) {
        if (a.condition) check_reads(*a.condition, a.origin.span);
        if (a.value) check_reads(*a.value, a.origin.span);
      }
    }
  }

  // (f)
  for (const auto& id : continuous_targets) {
    if (stored_targets.count(id)) {
      const VariableDecl* v = model.find_variable(id);
      error("output '" + id + "' is driven by both continuous and stored actions",
            v ? v->origin.span : SourceSpan{});
    }
  }
  return diags;
}

AnalysisResult analyze(const GrafcetModel& parsed) {
  AnalysisResult result;
  GrafcetModel expanded;
  try {
    expanded = expand_macros(parsed, &result.diagnostics);
    result.hierarchy = compute_hierarchy(expanded);
  } catch (const AnalysisError& e) {
    result.diagnostics.push_back(
        {Severity::error, std::string(to_string(e.kind())) + ": " + e.what(), e.span()});
    return result;
  }
  expanded.depth_of = result.hierarchy.depth;
  auto diags = validate(expanded);
  result.diagnostics.insert(result.diagnostics.end(), diags.begin(), diags.end());
  if (!has_errors(result.diagnostics)) result.model = std::move(expanded);
  return result;
}

AnalysisResult load_model(const std::filesystem::path& path) {
  ParseResult parsed = parse_model_file(path);
  if (!parsed.ok()) {
    AnalysisResult r;
    r.diagnostics = std::move(parsed.diagnostics);
    return r;
  }
  AnalysisResult r = analyze(*parsed.model);
  r.diagnostics.insert(r.diagnostics.begin(), parsed.diagnostics.begin(),
                       parsed.diagnostics.end());
  return r;
}

}  // namespace grafcet
