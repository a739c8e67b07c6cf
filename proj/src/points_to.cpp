// Copyright 2026 The tajpar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <deque>

#include "tajpar/heap.h"

namespace tajpar {

namespace {

const std::set<int> kNoSites;

std::string Key(std::string_view function, std::string_view local) {
  std::string k(function);
  k += '\x1f';
  k += local;
  return k;
}

constexpr std::string_view kReturnSlot = "\x1freturn";

bool AddAll(std::set<int>* dst, const std::set<int>& src) {
  size_t before = dst->size();
  dst->insert(src.begin(), src.end());
  return dst->size() != before;
}

}  // namespace

std::string Site::ToString() const {
  switch (kind) {
    case SiteKind::kAlloc:
      return "alloc:" + function + "@" + std::to_string(index);
    case SiteKind::kParam:
      return std::string(entry_input ? "input:" : "param:") + function + "#" +
             std::to_string(index);
    case SiteKind::kGlobal:
      return "global:" + name;
    case SiteKind::kExternal:
      return "extern:" + name;
  }
  return "?";
}

const std::set<int>& PointsTo::Env(std::string_view function,
                                   std::string_view local) const {
  auto it = env_.find(Key(function, local));
  return it == env_.end() ? kNoSites : it->second;
}

const std::set<int>& PointsTo::Contents(int site) const {
  auto it = contents_.find(site);
  return it == contents_.end() ? kNoSites : it->second;
}

const std::set<int>& PointsTo::GlobalTargets(std::string_view global) const {
  auto it = globals_.find(std::string(global));
  return it == globals_.end() ? kNoSites : it->second;
}

int PointsTo::AllocSite(std::string_view function, int index) const {
  for (size_t i = 0; i < sites_.size(); ++i) {
    const Site& s = sites_[i];
    if (s.kind == SiteKind::kAlloc && s.function == function &&
        s.index == index) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::set<std::string> CallGraph::ReachableFrom(const std::string& root) const {
  std::set<std::string> seen{root};
  std::deque<std::string> work{root};
  while (!work.empty()) {
    std::string f = work.front();
    work.pop_front();
    auto it = edges.find(f);
    if (it == edges.end()) continue;
    for (const std::string& g : it->second) {
      if (seen.insert(g).second) work.push_back(g);
    }
  }
  return seen;
}

CallGraph BuildCallGraph(const Program& p) {
  CallGraph cg;
  for (const auto& [sig, f] : p.functions) {
    cg.edges[sig];
    for (const Statement& s : f.statements) {
      const auto* call = s.As<CallStmt>();
      if (!call) continue;
      if (const FunctionDef* callee = p.FindFunctionByName(call->callee)) {
        cg.edges[sig].insert(callee->signature());
      } else if (auto r = p.ResolveCallee(call->callee)) {
        cg.external[sig].insert(*r);
      } else {
        cg.external[sig].insert(call->callee);
      }
    }
  }
  return cg;
}

PointsTo ComputePointsTo(const Program& p) {
  PointsTo pt;
  CallGraph cg = BuildCallGraph(p);

  std::set<std::string> closed;
  if (p.entry) {
    closed = cg.ReachableFrom(*p.entry);
    closed.erase(*p.entry);
  }

  auto new_site = [&](Site s) {
    pt.sites_.push_back(std::move(s));
    return static_cast<int>(pt.sites_.size() - 1);
  };

  for (const GlobalDecl& g : p.globals) {
    if (g.kind == GlobalKind::kArrayInt || g.kind == GlobalKind::kArrayReal) {
      int s = new_site(Site{SiteKind::kGlobal, "", 0, g.name, false});
      pt.globals_[g.name].insert(s);
    }
  }
  for (const auto& [sig, f] : p.functions) {
    if (closed.count(sig)) continue;
    pt.open_.insert(sig);
    for (size_t k = 0; k < f.params.size(); ++k) {
      if (!IsReferenceKind(f.params[k].kind)) continue;
      int s = new_site(Site{SiteKind::kParam, sig, static_cast<int>(k), "",
                            p.entry.has_value() && *p.entry == sig});
      pt.env_[Key(sig, f.params[k].name)].insert(s);
    }
    for (const Statement& st : f.statements) {
      if (st.Is<NewStmt>()) {
        new_site(Site{SiteKind::kAlloc, sig, st.index, "", false});
      }
    }
  }
  // Allocation sites in closed functions too.
  for (const auto& [sig, f] : p.functions) {
    if (!closed.count(sig)) continue;
    for (const Statement& st : f.statements) {
      if (st.Is<NewStmt>()) {
        new_site(Site{SiteKind::kAlloc, sig, st.index, "", false});
      }
    }
  }
  std::map<std::string, int> extern_sites;
  auto extern_site = [&](const std::string& name) {
    auto it = extern_sites.find(name);
    if (it != extern_sites.end()) return it->second;
    int s = new_site(Site{SiteKind::kExternal, "", 0, name, false});
    extern_sites[name] = s;
    return s;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [sig, f] : p.functions) {
      auto env = [&](const std::string& local) -> std::set<int>& {
        return pt.env_[Key(sig, local)];
      };
      auto flow = [&](std::set<int>* dst, const std::set<int>& src) {
        // `src` may alias `dst`'s map; copy first.
        std::set<int> copy = src;
        changed |= AddAll(dst, copy);
      };
      for (const Statement& st : f.statements) {
        if (const auto* x = st.As<IdentityStmt>()) {
          flow(&env(x->target), env(f.params[x->param].name));
        } else if (const auto* x = st.As<AssignStmt>()) {
          if (x->value.is_atom() && x->value.lhs.is_local()) {
            flow(&env(x->target), env(x->value.lhs.name()));
          }
        } else if (const auto* x = st.As<ArrayLoadStmt>()) {
          std::set<int> bases = env(x->base);
          for (int s : bases) flow(&env(x->target), pt.contents_[s]);
        } else if (const auto* x = st.As<ArrayStoreStmt>()) {
          if (x->value.is_local()) {
            std::set<int> bases = env(x->base);
            for (int s : bases) flow(&pt.contents_[s], env(x->value.name()));
          }
        } else if (const auto* x = st.As<FieldLoadStmt>()) {
          std::set<int> bases = env(x->object);
          for (int s : bases) flow(&env(x->target), pt.contents_[s]);
        } else if (const auto* x = st.As<FieldStoreStmt>()) {
          if (x->value.is_local()) {
            std::set<int> bases = env(x->object);
            for (int s : bases) flow(&pt.contents_[s], env(x->value.name()));
          }
        } else if (const auto* x = st.As<GlobalLoadStmt>()) {
          flow(&env(x->target), pt.globals_[x->global]);
        } else if (const auto* x = st.As<GlobalStoreStmt>()) {
          if (x->value.is_local()) {
            flow(&pt.globals_[x->global], env(x->value.name()));
          }
        } else if (const auto* x = st.As<NewStmt>()) {
          int s = pt.AllocSite(sig, st.index);
          changed |= env(x->target).insert(s).second;
        } else if (const auto* x = st.As<CallStmt>()) {
          const FunctionDef* callee = p.FindFunctionByName(x->callee);
          if (callee) {
            std::string csig = callee->signature();
            for (size_t k = 0; k < x->args.size(); ++k) {
              if (!x->args[k].is_local()) continue;
              flow(&pt.env_[Key(csig, callee->params[k].name)],
                   env(x->args[k].name()));
            }
            if (x->target) {
              flow(&env(*x->target), pt.env_[Key(csig, kReturnSlot)]);
            }
          } else if (x->target) {
            changed |= env(*x->target).insert(extern_site(x->callee)).second;
            for (const Operand& a : x->args) {
              if (a.is_local()) flow(&env(*x->target), env(a.name()));
            }
          }
        } else if (const auto* x = st.As<ReturnStmt>()) {
          if (x->value && x->value->is_local()) {
            flow(&pt.env_[Key(sig, kReturnSlot)], env(x->value->name()));
          }
        }
      }
    }
  }
  return pt;
}

bool MayAlias(const PointsTo& pt, std::string_view function,
              std::string_view a, std::string_view b) {
  const std::set<int>& ea = pt.Env(function, a);
  const std::set<int>& eb = pt.Env(function, b);
  for (int s : ea) {
    if (eb.count(s)) return true;
  }
  auto any = [&](const std::set<int>& e, bool (Site::*pred)() const) {
    for (int s : e) {
      if ((pt.sites()[s].*pred)()) return true;
    }
    return false;
  };
  return (any(ea, &Site::unknown) && any(eb, &Site::preexisting)) ||
         (any(eb, &Site::unknown) && any(ea, &Site::preexisting));
}

}  // namespace tajpar
