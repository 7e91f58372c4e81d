/*
 * Copyright 2026 The robustqa Authors.
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

#include "synthetic.hpp"

#include <array>

#include "robustqa/common.hpp"

namespace robustqa::testing {

namespace {

constexpr std::array<const char*, 19> kNames = {"Dovel",   "Marrin",  "Ostbury", "Pellan",    "Ravick",
                                                 "Sorrel",  "Tamsin",  "Ulver",   "Brennick",  "Calder",
                                                 "Elmsworth", "Fenwick", "Garrow", "Hadley",   "Iverson",
                                                 "Jorvik",  "Kellam",  "Lindell", "Norcott"};
constexpr std::array<const char*, 8> kKinds = {"Bridge", "Tower", "Hall", "Chapel", "Library", "Gate", "Market", "Museum"};
constexpr std::array<const char*, 6> kTowns = {"Ashford", "Bexley", "Corbridge", "Dunmore", "Eastleigh", "Fairholm"};

struct Relation {
  const char* noun;
  const char* phrase;
};
constexpr std::array<Relation, 5> kRelations = {{{"architect", "designed by"},
                                                 {"founder", "founded by"},
                                                 {"namesake", "named after"},
                                                 {"builder", "built by"},
                                                 {"patron", "funded by"}}};

constexpr std::array<const char*, 48> kFiller = {
    "the",     "old",      "stone",   "river",   "market",   "garden",   "north",    "eastern",
    "building", "was",     "opened",  "after",   "years",    "of",       "planning", "local",
    "council", "many",     "visitors", "walk",   "along",    "quiet",    "streets",  "today",
    "during",  "summer",   "students", "gather", "near",     "square",   "morning",  "bells",
    "ring",    "every",    "hour",    "its",     "walls",    "are",      "made",     "from",
    "grey",    "brick",    "city",    "records", "describe", "residents", "rebuilt", "later"};

std::string pick_words(Rng& rng, std::size_t lo, std::size_t hi) {
  const std::size_t n = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kFiller[rng.below(kFiller.size())];
  }
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string filler_sentence(Rng& rng) {
  std::string s = capitalize(pick_words(rng, 4, 8));
  const std::size_t clauses = rng.below(3);
  for (std::size_t i = 0; i < clauses; ++i) s += ", " + pick_words(rng, 2, 5);
  return s + ".";
}

json fixture(const std::string& template_name, const clients::ChatRequest& req, const std::string& reply) {
  return json{{"template", template_name}, {"prompt_sha256", sha256_hex(req.user)}, {"reply", reply}};
}

}  // namespace

std::string letters(std::size_t i) {
  std::string s(3, 'a');
  s[2] = static_cast<char>('a' + i % 26);
  s[1] = static_cast<char>('a' + (i / 26) % 26);
  s[0] = static_cast<char>('a' + (i / 676) % 26);
  return s;
}

std::vector<triples::Triple> movie_triples() {
  return {{"The Deadly Tower", "directed by", "Jerry Jameson"},
          {"The Deadly Tower", "released in", "1975"},
          {"The Deadly Tower", "starring", "Kurt Russell"},
          {"The Towering Inferno", "directed by", "John Guillermin"},
          {"The Towering Inferno", "starring", "Paul Newman"},
          {"The Towering Inferno", "released in", "1974"},
          {"Tower Heist", "directed by", "Brett Ratner"},
          {"Tower Heist", "starring", "Ben Stiller"},
          {"The Bridge on the River Kwai", "directed by", "David Lean"},
          {"The Bridge on the River Kwai", "released in", "1957"},
          {"A Bridge Too Far", "directed by", "Richard Attenborough"},
          {"Night at the Museum", "directed by", "Shawn Levy"},
          {"Night at the Museum", "starring", "Ben Stiller"},
          {"The Library", "released in", "1947"},
          {"Hall Pass", "directed by", "Peter Farrelly"},
          {"Gate of Hell", "directed by", "Teinosuke Kinugasa"},
          {"Gate of Hell", "released in", "1953"},
          {"The Chapel", "released in", "2004"},
          {"Market Street", "directed by", "Lois Weber"},
          {"The Old Dark House", "directed by", "James Whale"}};
}

QARecord mitchell_tower() {
  QARecord r;
  r.id = "squad-mitchell-tower";
  r.dataset_id = "squad";
  r.question = "The Mitchell Tower is designed to look like what Oxford tower?";
  r.context =
      "The first buildings of the University of Chicago campus, which make up what is now known as the Main "
      "Quadrangles, were part of a \"master plan\" conceived by two University of Chicago trustees and plotted by "
      "Chicago architect Henry Ives Cobb. The Main Quadrangles consist of six quadrangles, each surrounded by "
      "buildings, bordering one larger quadrangle. The buildings of the Main Quadrangles were designed by Cobb, "
      "Shepley, Rutan and Coolidge, Holabird & Roche, and other architectural firms in a mixture of the Victorian "
      "Gothic and Collegiate Gothic styles, patterned on the colleges of the University of Oxford. (Mitchell "
      "Tower, for example, is modeled after Oxford's Magdalen Tower, and the university Commons, Hutchinson Hall, "
      "replicates Christ Church Hall.)";
  r.answer = "Magdalen Tower";
  r.language = Language::English;
  return r;
}

Synthetic make_synthetic(const SyntheticOptions& options) {
  Synthetic syn;
  const auto templates = clients::TemplateSet::defaults();
  Rng rng(options.seed);
  syn.knowledge = movie_triples();

  for (std::size_t i = 0; i < options.records; ++i) {
    QARecord r;
    r.id = "syn-" + std::to_string(10000 + i).substr(1);
    r.dataset_id = "synthetic";
    r.language = Language::English;
    const std::string subject = std::string(kNames[rng.below(kNames.size())]) + " " + kKinds[rng.below(kKinds.size())];
    const Relation rel = kRelations[rng.below(kRelations.size())];
    const std::string town = kTowns[rng.below(kTowns.size())];
    r.answer = "Qarv" + letters(i);
    if (i % 7 == 3) r.answer += " Hollow";
    r.question = "Who is the " + std::string(rel.noun) + " of " + subject + "?";

    const std::size_t sentences = rng.below(20) == 0 ? 1 : 2 + static_cast<std::size_t>(rng.below(4));
    const std::size_t at = rng.below(sentences);
    const bool twice = sentences > 2 && rng.below(10) == 0;
    std::string context;
    for (std::size_t k = 0; k < sentences; ++k) {
      if (k) context += ' ';
      if (k == at) {
        context += subject + " was " + rel.phrase + " " + r.answer + ", " + pick_words(rng, 3, 6) + ".";
      } else if (twice && k == (at + 1) % sentences) {
        context += "Records name " + r.answer + " as the " + rel.noun + ", " + pick_words(rng, 2, 4) + ".";
      } else {
        context += filler_sentence(rng);
      }
    }
    r.context = context;

    // Extraction reply.
    const auto extract_req = clients::make_request(templates, clients::templates::kTripleExtraction, r.language,
                                                   {{"question", r.question}, {"context", r.context}});
    const std::string good = subject + " ||| " + rel.phrase + " ||| " + r.answer + "\n" + subject +
                             " ||| located in ||| " + town;
    const std::size_t roll = rng.below(100);
    if (!options.inject_faults || roll < 85) {
      syn.completion_fixtures.push_back(fixture(clients::templates::kTripleExtraction, extract_req, good));
    } else if (roll < 92) {
      syn.completion_fixtures.push_back(
          fixture(clients::templates::kTripleExtraction, extract_req, subject + " ||| located in ||| " + town));
    } else if (roll < 95) {
      syn.completion_fixtures.push_back(
          fixture(clients::templates::kTripleExtraction, extract_req, "I found these facts: " + subject));
    } else if (roll < 97) {
      json f = fixture(clients::templates::kTripleExtraction, extract_req, "");
      f["refusal"] = true;
      syn.completion_fixtures.push_back(f);
    }  // else: no canned reply, the mock reports a transport failure

    // False-answer replies.
    const std::string wrong = "Wexl" + letters(i);
    const auto fa_req = clients::make_request(templates, clients::templates::kFalseAnswer, r.language,
                                              {{"question", r.question}, {"answer", r.answer}, {"avoid", ""}});
    const std::size_t fa_roll = rng.below(100);
    if (fa_roll < 80) {
      syn.completion_fixtures.push_back(fixture(clients::templates::kFalseAnswer, fa_req, wrong));
    } else if (fa_roll < 95) {
      // First candidate repeats the gold answer; the retry prompt lists it.
      syn.completion_fixtures.push_back(fixture(clients::templates::kFalseAnswer, fa_req, r.answer));
      const auto retry_req =
          clients::make_request(templates, clients::templates::kFalseAnswer, r.language,
                                {{"question", r.question}, {"answer", r.answer}, {"avoid", "\nDo not answer with: " + r.answer}});
      syn.completion_fixtures.push_back(fixture(clients::templates::kFalseAnswer, retry_req, wrong));
    } else {
      syn.completion_fixtures.push_back(fixture(clients::templates::kFalseAnswer, fa_req, r.answer + " Junior"));
    }

    const auto he_req =
        clients::make_request(templates, clients::templates::kHeadEntities, r.language, {{"question", r.question}});
    syn.completion_fixtures.push_back(fixture(clients::templates::kHeadEntities, he_req, subject));

    // Knowledge base: one answer-free and (every third record) one answer-bearing fact.
    syn.knowledge.push_back({subject, "located in", town});
    if (i % 3 == 0) syn.knowledge.push_back({subject, rel.phrase, r.answer});

    syn.records.push_back(std::move(r));
  }

  syn.search_fixtures.push_back(
      {{"query", "*"},
       {"results",
        json::array({{{"title", "Historic buildings"},
                      {"snippet", "A general overview of historic buildings, their architects and their patrons."},
                      {"url", "https://example.org/historic-buildings"}},
                     {{"title", "Town guides"},
                      {"snippet", "Town guides list bridges, towers and halls worth a visit."},
                      {"url", "https://example.org/town-guides"}}})}});
  return syn;
}

std::string Synthetic::completions_jsonl() const { return to_jsonl(completion_fixtures); }
std::string Synthetic::search_jsonl() const { return to_jsonl(search_fixtures); }

json Synthetic::squad_json() const {
  json data = json::array();
  for (const auto& r : records) {
    const auto pos = r.context.find(r.answer);
    data.push_back({{"title", r.id},
                    {"paragraphs",
                     json::array({{{"context", r.context},
                                   {"qas", json::array({{{"id", r.id},
                                                         {"question", r.question},
                                                         {"answers", json::array({{{"text", r.answer},
                                                                                   {"answer_start", pos}}})}}})}}})}});
  }
  return json{{"version", "1.1"}, {"data", data}};
}

std::unique_ptr<clients::MockCompletionClient> Synthetic::completion_client() const {
  return clients::MockCompletionClient::from_jsonl_text(completions_jsonl(), "synthetic");
}

std::unique_ptr<clients::MockSearchClient> Synthetic::search_client() const {
  return clients::MockSearchClient::from_jsonl_text(search_jsonl(), "synthetic");
}

void Synthetic::write_fixture_dir(const std::filesystem::path& dir) const {
  write_text_file(dir / "completions.jsonl", completions_jsonl());
  write_text_file(dir / "search.jsonl", search_jsonl());
}

ModelOutputs make_model_outputs(const std::vector<scenarios::ScenarioSample>& samples, std::uint64_t seed,
                                double correct_share, double wrong_share) {
  ModelOutputs out;
  Rng rng(seed);
  std::size_t k = 0;
  for (const auto& s : samples) {
    const double u = rng.uniform01();
    if (u < correct_share) {
      out.outputs.push_back(s.gold_answer);
      out.intended.push_back(Verdict::Correct);
    } else if (u < correct_share + wrong_share) {
      out.outputs.push_back("Zorblat " + letters(k++ % 17576));
      out.intended.push_back(Verdict::Wrong);
    } else {
      out.outputs.push_back("Sorry, I don't have enough information");
      out.intended.push_back(Verdict::Rejected);
    }
  }
  return out;
}

}  // namespace robustqa::testing
