// Copyright 2026 The TRMR Toolkit Authors
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

#include "support/fixtures.h"

#include <algorithm>
#include <stdexcept>

#include "support/oracles.h"
#include "trmr/derivation.h"
#include "trmr/operators.h"

namespace trmr::testing {

const std::vector<GoldenRow> &GoldenRows() {
  static const std::vector<GoldenRow> rows = {
      {"more", "How many more people were there than households?",
       "more(people, households)", {"people", "households"}},
      {"more-select", "Who has more people in it, Iraq or Iran?", "more-select(Iraq, Iran)",
       {"Iraq", "Iran"}},
      {"less", "How many less households were there compared to housing units?",
       "less(households, housing units)", {"households", "housing units"}},
      {"less-select", "Which gender group is smaller: females or male?",
       "less-select(females, male)", {"females", "male"}},
      {"cu", "How many percent of people were not white?", "cu(white)", {"white"}},
      {"completion-more", "How many points were the Bears winning by at halftime?",
       "completion-more(Bears)", {"Bears"}},
      {"completion-less", "How many points did the Lions lose the game by?",
       "completion-less(Lions)", {"Lions"}},
      {"after", "How many days after the stamps arrived were they placed on sale?",
       "after(stamps arrived, they placed on sale)", {"stamps arrived", "they placed on sale"}},
      // Published with the name after; the row documents after-select.
      {"after-select",
       "What happened second: Poeymirau and Freydenberg launched attecks or significant riots?",
       "after-select(Poeymirau and Freydenberg launched attecks, significant riots)",
       {"Poeymirau and Freydenberg launched attecks", "significant riots"}},
      {"before",
       "How many days before the Italians invaded Trieste was the fleet of the "
       "Austro-Hungarians destroyed?",
       "before(Italians invaded Trieste, fleet of the Austro-Hungarians destroyed)",
       {"Italians invaded Trieste", "fleet of the Austro-Hungarians destroyed"}},
      {"before-select",
       "Which happened first, the Battle of Vittorio Veneto or the Armistice of Villa Giusti?",
       "before-select(Battle of Vittorio Veneto, Armistice of Villa Giusti)",
       {"Battle of Vittorio Veneto", "Armistice of Villa Giusti"}},
      {"sum",
       "How many percents of the racial makeup of the county was either Asian or Pacific "
       "Islander?",
       "sum(Asian, Pacific Islander)", {"Asian", "Pacific Islander"}},
      {"count", "How many times did Manning throw to Clark?",
       "count(times did Manning throw to Clark)", {"times did Manning throw to Clark"}},
      {"time-span", "How many years did Micheal Tippets The Knot Garden use a classical guitar?",
       "time-span(Micheal Tippets The Knot Garden use a classical guitar)",
       {"Micheal Tippets The Knot Garden use a classical guitar"}},
      {"span", "What event finalized the Lordship of Dernbach being transferred to nassau?",
       "span(finalized the Lordship of Dernbach being transferred to nassau)",
       {"finalized the Lordship of Dernbach being transferred to nassau"}},
      {"sort", "Which racial group made up the smallest percentage of the population?",
       "sort(smallest, racial group)", {"smallest", "racial group"}},
      {"filter", "Which groups in percent are larger than 21%?", "filter(larger than 21%, groups)",
       {"larger than 21%", "groups"}},
  };
  return rows;
}

std::vector<std::string> TemplateOperators(int index) {
  int t = index % kTemplateCount;
  if (t == 17) return {"count", "filter"};
  return {GoldenRows()[static_cast<std::size_t>(t)].op};
}

namespace {

int Uniform(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Answer Number(std::int64_t v) { return NumberAnswer{Decimal::FromInt(v)}; }

Answer Tenth(std::int64_t tenths) { return NumberAnswer{*Decimal::Parse(Tenths(tenths))}; }

GroundedItem Value(const Span &span) { return GroundedItem{span, std::nullopt, std::nullopt}; }

GroundedItem Keyed(const Span &value, const Span &key) {
  return GroundedItem{value, std::nullopt, key};
}

struct Generated {
  std::string question;
  std::string expression;
  std::string passage;
  Grounding grounding;
  Answer answer;
};

// Two distinct full dates, ordered.
std::pair<CivilDay, CivilDay> OrderedDates(std::mt19937_64 &rng, int y0, int y1) {
  for (;;) {
    CivilDay a = RandomCivilDay(rng, y0, y1);
    CivilDay b = RandomCivilDay(rng, y0, y1);
    std::int64_t d = NaiveDaysBetween(a, b);
    if (d == 0) continue;
    return d > 0 ? std::make_pair(a, b) : std::make_pair(b, a);
  }
}

std::vector<int> DistinctValues(std::mt19937_64 &rng, int n, int lo, int hi) {
  std::vector<int> out;
  while (static_cast<int>(out.size()) < n) {
    int v = Uniform(rng, lo, hi);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

Generated Generate(int index, std::mt19937_64 &rng) {
  const GoldenRow &row = GoldenRows()[static_cast<std::size_t>(index % kTemplateCount) %
                                      GoldenRows().size()];
  TextBuilder p(SpanSource::kPassage);
  Generated g{row.question, row.expression, "", {}, Number(0)};
  switch (index % kTemplateCount) {
    case 0: {  // more
      int a = Uniform(rng, 20000, 90000), b = Uniform(rng, 1000, 19999);
      p.Add("As of the census there were ");
      g.grounding.Add({}, "arg1", Value(p.Mark(WithCommas(a))));
      p.Add(" people and ");
      g.grounding.Add({}, "arg2", Value(p.Mark(WithCommas(b))));
      p.Add(" households residing in the city.");
      g.answer = Number(a - b);
      break;
    }
    case 1: {  // more-select
      std::vector<int> v = DistinctValues(rng, 2, 10, 40);
      p.Add("Iraq has a population of ");
      g.grounding.Add({}, "arg1", Value(p.Mark(std::to_string(v[0]) + " million")));
      p.Add(", while Iran has ");
      g.grounding.Add({}, "arg2", Value(p.Mark(std::to_string(v[1]) + " million")));
      p.Add(".");
      g.answer = SpanAnswer{{v[0] > v[1] ? "Iraq" : "Iran"}};
      break;
    }
    case 2: {  // less
      int h = Uniform(rng, 1000, 9000), u = h + Uniform(rng, 1, 900);
      p.Add("There were ");
      g.grounding.Add({}, "arg1", Value(p.Mark(WithCommas(h))));
      p.Add(" households out of ");
      g.grounding.Add({}, "arg2", Value(p.Mark(WithCommas(u))));
      p.Add(" housing units.");
      g.answer = Number(u - h);
      break;
    }
    case 3: {  // less-select
      std::vector<int> v = DistinctValues(rng, 2, 4000, 6000);
      p.Add("The population was ");
      g.grounding.Add({}, "arg1", Value(p.Mark(WithCommas(v[0]))));
      p.Add(" females and ");
      g.grounding.Add({}, "arg2", Value(p.Mark(WithCommas(v[1]))));
      p.Add(" males.");
      g.answer = SpanAnswer{{v[0] < v[1] ? "females" : "male"}};
      break;
    }
    case 4: {  // cu
      int tenths = Uniform(rng, 501, 999);
      p.Add("The racial makeup of the city was ");
      g.grounding.Add({}, "part", Value(p.Mark(Tenths(tenths) + "%")));
      p.Add(" White.");
      g.answer = Tenth(1000 - tenths);
      break;
    }
    case 5: {  // completion-more
      int a = Uniform(rng, 3, 14), b = Uniform(rng, 3, 14), c = Uniform(rng, 0, a + b - 1);
      p.Add("The Bears scored ");
      g.grounding.Add({}, "target", Value(p.Mark(std::to_string(a))));
      p.Add(" points in the first quarter and ");
      g.grounding.Add({}, "target", Value(p.Mark(std::to_string(b))));
      p.Add(" in the second. The Packers managed ");
      g.grounding.Add({}, "complement", Value(p.Mark(std::to_string(c))));
      p.Add(" points before halftime.");
      g.answer = Number(a + b - c);
      break;
    }
    case 6: {  // completion-less
      int a = Uniform(rng, 0, 30), b = a + Uniform(rng, 1, 21);
      p.Add("The Lions finished with ");
      g.grounding.Add({}, "target", Value(p.Mark(std::to_string(a))));
      p.Add(" points, while the Vikings scored ");
      g.grounding.Add({}, "complement", Value(p.Mark(std::to_string(b))));
      p.Add(".");
      g.answer = Number(b - a);
      break;
    }
    case 7: {  // after
      auto [a, b] = OrderedDates(rng, 1840, 1860);
      p.Add("The stamps arrived on ");
      g.grounding.Add({}, "arg1", Value(p.Mark(LongDate(a))));
      p.Add(" and were placed on sale on ");
      g.grounding.Add({}, "arg2", Value(p.Mark(LongDate(b, false))));
      p.Add(".");
      g.answer = Number(NaiveDaysBetween(a, b));
      break;
    }
    case 8:     // after-select
    case 10: {  // before-select
      auto [a, b] = OrderedDates(rng, 1900, 1930);
      bool swap = Uniform(rng, 0, 1) == 1;
      const std::string &first = row.args[0];
      const std::string &second = row.args[1];
      CivilDay d1 = swap ? b : a, d2 = swap ? a : b;
      p.Add("Accounts record that " + first + " on ");
      g.grounding.Add({}, "arg1", Value(p.Mark(LongDate(d1))));
      p.Add(". Separately, " + second + " on ");
      g.grounding.Add({}, "arg2", Value(p.Mark(LongDate(d2))));
      p.Add(".");
      bool first_is_later = NaiveDaysBetween(d2, d1) > 0;
      bool want_later = index % kTemplateCount == 8;
      g.answer = SpanAnswer{{first_is_later == want_later ? first : second}};
      break;
    }
    case 9: {  // before
      auto [a, b] = OrderedDates(rng, 1915, 1918);
      p.Add("The fleet of the Austro-Hungarians was destroyed on ");
      g.grounding.Add({}, "arg2", Value(p.Mark(LongDate(a, false))));
      p.Add(". The Italians invaded Trieste on ");
      g.grounding.Add({}, "arg1", Value(p.Mark(LongDate(b))));
      p.Add(".");
      g.answer = Number(NaiveDaysBetween(a, b));
      break;
    }
    case 11: {  // sum
      int w = Uniform(rng, 600, 900), a = Uniform(rng, 1, 150), pi = Uniform(rng, 0, 50);
      p.Add("The racial makeup of the county was " + Tenths(w) + "% White, ");
      g.grounding.Add({}, "arg1", Value(p.Mark(Tenths(a) + "%")));
      p.Add(" Asian and ");
      g.grounding.Add({}, "arg2", Value(p.Mark(Tenths(pi) + "%")));
      p.Add(" Pacific Islander.");
      g.answer = Tenth(a + pi);
      break;
    }
    case 12: {  // count
      int n = Uniform(rng, 1, 4);
      p.Add("Manning opened with ");
      for (int i = 0; i < n; ++i) {
        if (i > 0) p.Add(i + 1 == n ? " and later " : ", then ");
        g.grounding.Add({}, "items",
                        Value(p.Mark("a " + std::to_string(Uniform(rng, 2, 60)) +
                                     "-yard pass to Clark")));
      }
      p.Add(".");
      g.answer = Number(n);
      break;
    }
    case 13: {  // time-span
      int start = Uniform(rng, 1950, 1975), end = start + Uniform(rng, 1, 20);
      p.Add("Tippett wrote for classical guitar from ");
      g.grounding.Add({}, "start", Value(p.Mark(std::to_string(start))));
      p.Add(" until ");
      g.grounding.Add({}, "end", Value(p.Mark(std::to_string(end))));
      p.Add(", beginning with The Knot Garden.");
      g.answer = Number(end - start);
      break;
    }
    case 14: {  // span
      static const char *const kEvents[] = {"Treaty of Nassau", "Peace of Westphalia",
                                            "Congress of Vienna", "Diet of Worms"};
      std::string event = kEvents[Uniform(rng, 0, 3)];
      p.Add("The transfer of the Lordship of Dernbach was finalized by the ");
      g.grounding.Add({}, "arg1", Value(p.Mark(event)));
      p.Add(".");
      g.answer = SpanAnswer{{event}};
      break;
    }
    case 15: {  // sort
      static const char *const kGroups[] = {"White", "Black", "Asian", "Hispanic", "Native"};
      bool largest = (index / kTemplateCount) % 2 == 1;
      if (largest) {
        g.question = "Which racial group made up the largest percentage of the population?";
        g.expression = "sort(largest, racial group)";
      }
      int n = Uniform(rng, 2, 5);
      std::vector<int> v = DistinctValues(rng, n, 1, 400);
      p.Add("The population was ");
      for (int i = 0; i < n; ++i) {
        if (i > 0) p.Add(", ");
        Span value = p.Mark(Tenths(v[i]) + "%");
        p.Add(" ");
        Span key = p.Mark(kGroups[i]);
        g.grounding.Add({}, "items", Keyed(value, key));
      }
      p.Add(".");
      auto it = largest ? std::max_element(v.begin(), v.end())
                        : std::min_element(v.begin(), v.end());
      g.answer = SpanAnswer{{kGroups[it - v.begin()]}};
      break;
    }
    case 16: {  // filter
      static const char *const kGroups[] = {"under 18", "18 to 24", "25 to 44", "45 to 64",
                                            "65 or older"};
      int n = Uniform(rng, 2, 5);
      std::vector<int> v;
      for (int i = 0; i < n; ++i) v.push_back(Uniform(rng, 50, 400));
      v[static_cast<std::size_t>(Uniform(rng, 0, n - 1))] = Uniform(rng, 211, 400);
      std::vector<std::string> kept;
      p.Add("The age distribution was ");
      for (int i = 0; i < n; ++i) {
        if (i > 0) p.Add(", ");
        Span value = p.Mark(Tenths(v[i]) + "%");
        p.Add(" aged ");
        Span key = p.Mark(kGroups[i]);
        g.grounding.Add({}, "items", Keyed(value, key));
        if (v[i] > 210) kept.push_back(kGroups[i]);
      }
      p.Add(".");
      g.answer = SpanAnswer{kept};
      break;
    }
    default: {  // count(filter(...))
      g.question = kFieldGoalQuestion;
      g.expression = kFieldGoalExpression;
      int n = Uniform(rng, 2, 5);
      std::vector<int> yards;
      for (int i = 0; i < n; ++i) yards.push_back(Uniform(rng, 20, 58));
      yards[0] = Uniform(rng, 41, 58);
      p.Add("Gould kicked field goals of ");
      for (int i = 0; i < n; ++i) {
        if (i > 0) p.Add(", ");
        g.grounding.Add({0}, "items", Value(p.Mark(std::to_string(yards[i]) + "-yard")));
      }
      p.Add(" in the game.");
      g.answer = Number(std::count_if(yards.begin(), yards.end(), [](int y) { return y > 40; }));
      break;
    }
  }
  g.passage = p.text();
  return g;
}

}  // namespace

Corpus MakeFixtureCorpus(const FixtureOptions &options) {
  std::mt19937_64 rng(options.seed);
  Corpus corpus;
  for (int i = 0; i < options.records; ++i) {
    Generated g = Generate(i, rng);
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%04d", i);
    Passage passage{std::string("p-") + suffix, g.passage};
    Question question{std::string("q-") + suffix, passage.id, g.question, g.answer};

    AnnotationRecord record;
    record.id = FixtureRecordId(i);
    record.question_id = question.id;
    record.tree = ParseTrmr(g.expression, question);
    record.grounding = g.grounding;
    record.plan = AutoDerive(record.tree, record.grounding, DeriveOptions{question.text, nullptr});
    record.annotator_id = "ann-" + std::to_string(i % 4 + 1);
    bool rejected = options.rejected.count(i) > 0;
    for (int v = 0; v < 3; ++v) {
      Verdict verdict = Verdict::kValid;
      if (rejected) {
        verdict = v < 2 ? Verdict::kInvalid : Verdict::kValid;
      } else if (v == 2 && i % 3 == 0) {
        verdict = Verdict::kInvalid;
      }
      record.verdicts.push_back(ValidationVerdict{
          record.id, "val-" + std::to_string((i + v) % 5 + 1), verdict, std::nullopt});
    }
    record.status = rejected ? RecordStatus::kRejected : RecordStatus::kAccepted;
    record.version = 5;

    corpus.passages.emplace(passage.id, passage);
    corpus.questions.emplace(question.id, question);
    corpus.records.emplace(record.id, std::move(record));
  }
  return corpus;
}

namespace {

const AnnotationRecord &FirstOfTemplate(const Corpus &corpus, int t) {
  for (int i = t; i < static_cast<int>(corpus.records.size()); i += kTemplateCount) {
    auto it = corpus.records.find(FixtureRecordId(i));
    if (it != corpus.records.end()) return it->second;
  }
  throw std::runtime_error("fixture has no record of template " + std::to_string(t));
}

Span Shifted(Span span) {
  ++span.start;
  ++span.end;
  return span;
}

}  // namespace

std::vector<CorruptedRecord> CorruptRecords(const Corpus &clean) {
  std::vector<CorruptedRecord> out;

  {
    AnnotationRecord r = FirstOfTemplate(clean, 0);
    r.tree.args[0] = Shifted(r.tree.args[0].span());
    out.push_back({r, Rule::kV1, "leaf offsets shifted"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 2);
    Span leaf = r.tree.args[0].span();
    leaf.text = "household";
    r.tree.args[0] = leaf;
    out.push_back({r, Rule::kV1, "leaf text differs from question"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 4);
    GroundedItem &part = r.grounding.entries.at(GroundingKey{{}, "part"}).front();
    part.value_span = Shifted(part.value_span);
    out.push_back({r, Rule::kV2, "grounded value offsets shifted"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 15);
    GroundedItem &item = r.grounding.entries.at(GroundingKey{{}, "items"}).front();
    item.key_span->text = "Martian";
    out.push_back({r, Rule::kV2, "key span text differs from passage"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 0);
    r.tree.op = "most-more";
    out.push_back({r, Rule::kV3, "unknown operator"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 1);
    r.tree.args.pop_back();
    out.push_back({r, Rule::kV3, "argument removed"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 0);
    StepInput &input = r.plan.steps.front().inputs.front();
    NumberValue &n = std::get<NumberValue>(input.value);
    n.value = n.value + Decimal::FromInt(100);
    out.push_back({r, Rule::kV4, "plan input edited away from the gold answer"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 4);
    StepInput &input = r.plan.steps.front().inputs.front();
    PercentValue &pct = std::get<PercentValue>(input.value);
    pct.value = pct.value + Decimal::FromInt(1);
    out.push_back({r, Rule::kV4, "cu part edited in the plan"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 5);
    r.grounding.entries.erase(GroundingKey{{}, "complement"});
    out.push_back({r, Rule::kV5, "complement slot removed"});
  }
  {
    AnnotationRecord r = FirstOfTemplate(clean, 17);
    r.grounding.entries.erase(GroundingKey{{0}, "items"});
    out.push_back({r, Rule::kV5, "nested items slot removed"});
  }
  return out;
}

namespace {

const char *const kLeafPool[] = {
    "people",          "housing units",  "Smith, Jones",     "the (second) half",
    "say \"hi\"",      " padded ",       "larger than 21%",  "over 40 yards",
    "Iraq",            "field goals",    "a",                "count",
    "sum of the parts", "\"quoted\"",    "x)y",              "comma,",
    "  two  spaces",   "Treaty (1648)",  "largest",          "at least 3",
};

class TreeGenerator {
 public:
  explicit TreeGenerator(std::mt19937_64 &rng) : rng_(rng) {}

  GeneratedTree Run(int max_depth) {
    TrmrTree tree = Node(max_depth, std::nullopt);
    return GeneratedTree{std::move(tree), question_.text()};
  }

 private:
  // `want` restricts the result kind when the node is nested.
  TrmrTree Node(int depth, std::optional<ResultKind> want) {
    std::vector<const OperatorSig *> candidates;
    for (const OperatorSig &sig : Registry()) {
      if (!want || sig.result_kind == *want) candidates.push_back(&sig);
    }
    const OperatorSig &sig = *candidates[Pick(candidates.size())];
    TrmrTree node{sig.name, {}};
    std::size_t arity = sig.min_arity;
    if (sig.variadic) arity += Pick(3);
    for (std::size_t i = 0; i < arity; ++i) {
      bool ordinary = sig.slot_kind(i) == SlotKind::kOrdinary;
      if (ordinary && sig.accepts_nested && depth > 1 && Pick(3) == 0) {
        ResultKind child = sig.name == "count" ? ResultKind::kSpanList : ResultKind::kNumber;
        node.args.emplace_back(Node(depth - 1, child));
      } else {
        node.args.emplace_back(Leaf());
      }
    }
    return node;
  }

  Span Leaf() {
    if (!question_.text().empty()) question_.Add(" / ");
    return question_.Mark(kLeafPool[Pick(std::size(kLeafPool))]);
  }

  std::size_t Pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  std::mt19937_64 &rng_;
  TextBuilder question_{SpanSource::kQuestion};
};

}  // namespace

GeneratedTree RandomTree(std::mt19937_64 &rng, int max_depth) {
  return TreeGenerator(rng).Run(max_depth);
}

}  // namespace trmr::testing
