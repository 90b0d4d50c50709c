/*
 * Copyright (c) 2026, pgasrob authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PGASROB_MHA_HH_
#define PGASROB_MHA_HH_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgasrob {

using Letter = std::uint64_t;
using Word = std::vector<Letter>;

// Head 0 marks an epsilon label.
struct MhaLabel {
  int head = 0;
  Letter letter = 0;

  bool epsilon() const { return head == 0; }
  auto operator<=>(const MhaLabel&) const = default;
};

// comp(sigma) = proj_1(sigma) ... proj_n(sigma).
Word Comp(std::span<const MhaLabel> run, int heads);

class Alphabet {
 public:
  Letter Intern(const std::string& name);
  const std::string& Name(Letter l) const { return names_.at(l); }
  std::optional<Letter> Find(const std::string& name) const;
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, Letter> ids_;
};

class Nfa {
 public:
  int AddState(bool final = false);
  void SetInitial(int s) { initial_ = s; }
  void SetFinal(int s, bool final = true) { final_.at(s) = final; }
  void AddTransition(int from, Letter a, int to);
  void AddEpsilon(int from, int to);

  int size() const { return static_cast<int>(final_.size()); }
  int initial() const { return initial_; }
  bool IsFinal(int s) const { return final_[s]; }
  const std::vector<std::pair<Letter, int>>& Out(int s) const {
    return out_[s];
  }
  const std::vector<int>& Eps(int s) const { return eps_[s]; }

  std::set<int> Closure(std::set<int> states) const;
  bool Accepts(std::span<const Letter> word) const;
  // States reachable from s (including s) over letters and epsilon.
  std::vector<bool> Reachable(int s) const;

 private:
  int initial_ = 0;
  std::vector<bool> final_;
  std::vector<std::vector<std::pair<Letter, int>>> out_;
  std::vector<std::vector<int>> eps_;
};

struct MhaTransition {
  int from = 0;
  MhaLabel label;
  int to = 0;
};

class MultiheadedAutomaton {
 public:
  explicit MultiheadedAutomaton(int heads = 1) : heads_(heads) {}

  int heads() const { return heads_; }
  int AddState(bool final = false);
  void SetInitial(int s) { initial_ = s; }
  void SetFinal(int s, bool final = true) { final_.at(s) = final; }
  // Throws std::invalid_argument unless 1 <= head <= heads().
  void AddTransition(int from, int head, Letter a, int to);
  void AddEpsilon(int from, int to);

  int size() const { return static_cast<int>(final_.size()); }
  int initial() const { return initial_; }
  bool IsFinal(int s) const { return final_[s]; }
  const std::vector<MhaTransition>& Out(int s) const { return out_[s]; }
  int TransitionCount() const;

 private:
  int heads_;
  int initial_ = 0;
  std::vector<bool> final_;
  std::vector<std::vector<MhaTransition>> out_;
};

// Opaque packed state of a lazily presented automaton.
using StateKey = std::string;

struct MhaEdge {
  MhaLabel label;
  StateKey target;
};

class MhaView {
 public:
  virtual ~MhaView() = default;
  virtual int heads() const = 0;
  virtual StateKey Initial() const = 0;
  virtual bool IsFinal(const StateKey& s) const = 0;
  virtual void Successors(const StateKey& s, std::vector<MhaEdge>& out) const = 0;
};

class ExplicitView : public MhaView {
 public:
  explicit ExplicitView(const MultiheadedAutomaton& a) : a_(a) {}

  int heads() const override { return a_.heads(); }
  StateKey Initial() const override { return Key(a_.initial()); }
  bool IsFinal(const StateKey& s) const override {
    return a_.IsFinal(State(s));
  }
  void Successors(const StateKey& s, std::vector<MhaEdge>& out) const override;

  static StateKey Key(int s);
  static int State(const StateKey& k);

 private:
  const MultiheadedAutomaton& a_;
};

// One-headed view of an NFA.
MultiheadedAutomaton FromNfa(const Nfa& v);

// Literal product construction with initial guesses: states
// {init} + Q_U x Omega x Omega, materialized over the reachable part.
MultiheadedAutomaton Intersect(const MultiheadedAutomaton& u, const Nfa& v);

// The same construction explored on the fly over a lazy U.
class LazyIntersection : public MhaView {
 public:
  LazyIntersection(const MhaView& u, const Nfa& v);

  int heads() const override { return u_.heads(); }
  StateKey Initial() const override;
  bool IsFinal(const StateKey& s) const override;
  void Successors(const StateKey& s, std::vector<MhaEdge>& out) const override;

 private:
  struct Decoded {
    StateKey u;
    std::vector<int> w1, w2;
  };
  Decoded Decode(const StateKey& s) const;
  StateKey Encode(const StateKey& u, const std::vector<int>& w1,
                  const std::vector<int>& w2) const;
  void Guesses(int k, std::vector<int>& w, std::vector<StateKey>& out) const;

  const MhaView& u_;
  const Nfa& v_;
  std::vector<std::vector<bool>> reach_;
};

// A deterministic automaton with at most 255 states and an implicit dead
// state (Step returns -1).
class DfaComponent {
 public:
  virtual ~DfaComponent() = default;
  virtual int states() const = 0;
  virtual int initial() const = 0;
  virtual int Step(int state, Letter a) const = 0;
};

// Synchronous product of DFA components with an acceptance predicate over
// the tuple of component states.
struct ProductDfa {
  std::vector<std::shared_ptr<const DfaComponent>> parts;
  std::function<bool(std::span<const int>)> accept;

  bool Accepts(std::span<const Letter> word) const;
  // Explicit NFA over the reachable product for the given alphabet.
  Nfa Materialize(std::span<const Letter> alphabet) const;
};

// Product of a lazy U with a deterministic V. Head 1 runs V from its
// initial state; every further head k records the state transformation its
// subword induces, composed at acceptance. Accepts L(U) intersected with
// L(V), without guessing intermediate states.
class SummaryIntersection : public MhaView {
 public:
  SummaryIntersection(const MhaView& u, const ProductDfa& v);

  int heads() const override { return u_.heads(); }
  StateKey Initial() const override;
  bool IsFinal(const StateKey& s) const override;
  void Successors(const StateKey& s, std::vector<MhaEdge>& out) const override;

 private:
  const MhaView& u_;
  const ProductDfa& v_;
  std::vector<int> sizes_;
  int summary_bytes_ = 0;
};

enum class SearchStatus { kFound, kEmpty, kExhausted };

struct SearchResult {
  SearchStatus status = SearchStatus::kEmpty;
  std::vector<MhaLabel> run;
  Word word;
  std::uint64_t states = 0;
};

// Breadth-first search for an accepting run of minimal transition count,
// ties broken by label order. max_states = 0 means unbounded.
SearchResult FindWitness(const MhaView& a, std::uint64_t max_states = 0);
bool IsEmpty(const MhaView& a);
bool IsEmpty(const MultiheadedAutomaton& a);
std::optional<SearchResult> Witness(const MultiheadedAutomaton& a);

// All comp-words of accepted runs with at most max_len letters.
std::set<Word> BoundedLanguage(const MhaView& a, int max_len);
std::set<Word> BoundedLanguage(const MultiheadedAutomaton& a, int max_len);
std::set<Word> BoundedLanguage(const Nfa& a, int max_len);

// Text format, one item per line:
//   heads <n>
//   initial <state>
//   final <state>...
//   <from> <head> <letter> <to>
//   <from> eps <to>
MultiheadedAutomaton ParseMha(std::string_view text, Alphabet& sigma);
std::string PrintMha(const MultiheadedAutomaton& a, const Alphabet& sigma);
std::string MhaToDot(const MultiheadedAutomaton& a, const Alphabet& sigma);

}  // namespace pgasrob

#endif  // PGASROB_MHA_HH_
