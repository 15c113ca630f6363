#include "reqgrid/datagen.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

namespace {

// A tiny deterministic stream used only to vary filler words and numbers.
struct Mixer {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

const std::vector<std::string> kSubjects = {
    "The system", "The product", "The application", "The server", "The portal"};
const std::vector<std::string> kObjects = {
    "customer records", "order data",   "account details", "shipment entries",
    "inventory items",  "user profiles", "report files"};

// Sentence templates per class. {s} = subject, {o} = object, {n} = number.
// About half the templates end without terminal punctuation so the
// sentence-completion variation has work to do, and several carry commas or
// quotes for the punctuation-stripping variation.
const std::map<std::string, std::vector<std::string>>& class_templates() {
  static const std::map<std::string, std::vector<std::string>> templates = {
      {"Functional",
       {"{s} shall let the operator create, edit, and delete {o}",
        "{s} shall record every change made to {o} in the audit log.",
        "{s} must allow a clerk to search {o} by identifier",
        "{s} shall export {o} as a printable summary, on demand."}},
      {"Usability",
       {"{s} shall be easy for a new user to learn within {n} minutes of first use",
        "A first-time user must find the interface intuitive, with no training.",
        "{s} shall offer ease of use so that a user completes a booking in under {n} steps",
        "Users shall learn the symbols of {s} without a manual."}},
      {"Security",
       {"{s} shall encrypt {o} before transmission, using approved algorithms.",
        "Only staff with valid authentication may access {o}",
        "{s} must protect {o} against unauthorised access",
        "{s} shall keep {o} secure, and log every access attempt."}},
      {"Operational",
       {"{s} shall run in the standard data-centre environment without manual steps",
        "{s} must integrate with the existing dispatch interface.",
        "{s} shall operate on the approved platform, version {n} or later",
        "{s} must interface with the corporate directory environment."}},
      {"Performance",
       {"{s} shall return search results in under {n} seconds.",
        "{s} must sustain a throughput of {n} requests per second",
        "Any page of {s} shall render fast, within {n} seconds",
        "{s} shall complete a nightly batch in at most {n} minutes."}},
      {"Look & feel",
       {"{s} shall have an attractive, modern appearance",
        "The look and feel of {s} shall match the corporate style guide.",
        "{s} shall present a consistent visual style across screens",
        "The appearance of {s} shall appeal to the target audience."}},
      {"Availability",
       {"{s} shall be available {n} hours a day, every day.",
        "{s} must stay accessible during scheduled maintenance windows",
        "{s} shall achieve an uptime of at least 99.{n} percent",
        "{s} shall remain available to field staff at all times."}},
      {"Scalability",
       {"{s} shall scale to {n} concurrent users without degradation",
        "{s} must handle growth in data volume, doubling capacity every year.",
        "{s} shall support the expected growth to {n} sites",
        "The capacity of {s} shall scale with demand."}},
      {"Maintainability",
       {"{s} shall be easy to maintain by a single administrator",
        "A developer must be able to update business rules within {n} hours.",
        "{s} shall allow maintenance staff to modify report layouts",
        "Corrections to {s} shall not require a full reinstall."}},
      {"Legal",
       {"{s} shall comply with the applicable data-protection regulation",
        "{s} must meet the legal retention standard for {o}.",
        "All exports of {s} shall comply with local law",
        "{s} shall satisfy the industry standard, as amended."}},
      {"Fault tolerance",
       {"{s} shall continue operating when a single node suffers a failure",
        "{s} must recover from a fault within {n} seconds.",
        "After a component failure, {s} shall recover without data loss",
        "{s} shall tolerate disk faults, switching to a mirror."}},
      {"Portability",
       {"{s} shall be portable across the supported operating systems."}},
      // SecReq-style rows
      {"sec",
       {"{s} shall encrypt {o} end to end, with mutual authentication.",
        "{s} must verify the authentication token before it grants access",
        "{s} shall protect the secure channel against replay",
        "All access to {o} shall require secure authentication."}},
      {"nonsec",
       {"{s} shall display the current balance of {o}",
        "{s} must provide a printed receipt for every order.",
        "The user may review {o} before confirming the order",
        "{s} shall provide a general summary screen for {o}."}},
      // Functional-Quality clauses
      {"fq-functional",
       {"{s} shall let the user submit, amend, and cancel {o}",
        "{s} must record each transaction against {o}.",
        "{s} shall notify the clerk once {o} are updated",
        "{s} shall provide a search over {o} by date."}},
      {"fq-nonfunctional",
       {"{s} shall respect the agreed quality constraint on every property of the service",
        "{s} must honour the availability constraint, a key quality property.",
        "The quality of {s} shall satisfy the agreed constraint",
        "{s} shall meet each stated quality property."}},
      {"fq-quality",
       {"its performance and reliability shall meet the agreed quality targets",
        "the efficiency of the service shall satisfy the quality plan.",
        "response quality, including reliability, shall stay within targets",
        "the agreed targets shall hold under regular review",
        "the quality targets for efficiency shall hold under load."}},
      {"fq-nonquality",
       {"the feature set shall cover each functional behavior in scope",
        "every function shall expose its behavior through the public interface.",
        "each functional behavior shall be reachable from the menu",
        "the documented scope shall stay under regular review",
        "the function catalogue shall list every supported feature."}},
  };
  return templates;
}

std::string instantiate(const std::string& tmpl, Mixer& mix) {
  std::string out = tmpl;
  auto replace_all = [&](const std::string& ph, const std::string& value) {
    std::size_t pos;
    while ((pos = out.find(ph)) != std::string::npos) out.replace(pos, ph.size(), value);
  };
  replace_all("{s}", kSubjects[mix.pick(kSubjects.size())]);
  replace_all("{o}", kObjects[mix.pick(kObjects.size())]);
  replace_all("{n}", std::to_string(2 + mix.pick(58)));
  return out;
}

std::string class_sentence(const std::string& cls, std::size_t i, Mixer& mix) {
  const auto& pool = class_templates().at(cls);
  return instantiate(pool[i % pool.size()], mix);
}

// Largest-remainder interleave: emits class indices so every class is spread
// evenly through the file instead of arriving in blocks.
std::vector<std::size_t> interleave(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  std::vector<std::size_t> emitted(counts.size(), 0);
  std::vector<std::size_t> order;
  order.reserve(total);
  for (std::size_t step = 0; step < total; ++step) {
    double best_deficit = -1.0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (emitted[c] >= counts[c]) continue;
      double target = static_cast<double>(counts[c]) * static_cast<double>(step + 1) /
                      static_cast<double>(total);
      double deficit = target - static_cast<double>(emitted[c]);
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = c;
      }
    }
    order.push_back(best);
    emitted[best] += 1;
  }
  return order;
}

}  // namespace

std::vector<Requirement> sample_promise() {
  const std::vector<std::pair<std::string, std::size_t>> roster = {
      {"Functional", 255},    {"Usability", 67},      {"Security", 66},
      {"Operational", 62},    {"Performance", 54},    {"Look & feel", 38},
      {"Availability", 21},   {"Scalability", 21},    {"Maintainability", 17},
      {"Legal", 13},          {"Fault tolerance", 10}, {"Portability", 1},
  };
  std::vector<std::size_t> counts;
  for (const auto& [cls, n] : roster) counts.push_back(n);

  Mixer mix;
  std::vector<std::size_t> per_class(roster.size(), 0);
  std::vector<Requirement> reqs;
  std::size_t row = 0;
  for (std::size_t cls_index : interleave(counts)) {
    const auto& [cls, n] = roster[cls_index];
    Requirement r;
    r.id = "PR-" + std::to_string(1000 + row);
    r.project = "project-" + std::to_string(1 + row % 15);
    r.text = class_sentence(cls, per_class[cls_index], mix);
    r.labels["promise"] = cls;
    reqs.push_back(std::move(r));
    per_class[cls_index] += 1;
    ++row;
  }
  return reqs;
}

std::vector<Requirement> sample_functional_quality() {
  // Joint counts keep both binary marginals: Functional 578/378 and
  // Quality 522/434 over the same 956 rows.
  const std::vector<std::pair<std::pair<std::string, std::string>, std::size_t>> cells = {
      {{"Functional", "Quality"}, 300},
      {{"Functional", "NonQuality"}, 278},
      {{"NonFunctional", "Quality"}, 222},
      {{"NonFunctional", "NonQuality"}, 156},
  };
  const std::vector<std::string> projects = {"promise-reclassified", "dronology", "wasp",
                                             "leeds", "reqview"};
  std::vector<std::size_t> counts;
  for (const auto& [cell, n] : cells) counts.push_back(n);

  Mixer mix;
  std::vector<std::size_t> per_cell(cells.size(), 0);
  std::vector<Requirement> reqs;
  std::size_t row = 0;
  for (std::size_t cell_index : interleave(counts)) {
    const auto& [cell, n] = cells[cell_index];
    const auto& [functional_label, quality_label] = cell;
    Requirement r;
    r.id = "FQ-" + std::to_string(1000 + row);
    r.project = projects[row % projects.size()];
    std::string base = class_sentence(
        functional_label == "Functional" ? "fq-functional" : "fq-nonfunctional",
        per_cell[cell_index], mix);
    std::string clause = class_sentence(
        quality_label == "Quality" ? "fq-quality" : "fq-nonquality", per_cell[cell_index], mix);
    if (!base.empty() && base.back() == '.') base.pop_back();
    r.text = base + ", and " + clause;
    r.labels["functional"] = functional_label;
    r.labels["quality"] = quality_label;
    reqs.push_back(std::move(r));
    per_cell[cell_index] += 1;
    ++row;
  }
  return reqs;
}

std::vector<Requirement> sample_secreq() {
  const std::vector<std::pair<std::string, std::size_t>> roster = {
      {"sec", 187},
      {"nonsec", 323},
  };
  const std::vector<std::string> projects = {"ePurse", "CPN", "GPS"};
  std::vector<std::size_t> counts;
  for (const auto& [cls, n] : roster) counts.push_back(n);

  Mixer mix;
  std::vector<std::size_t> per_class(roster.size(), 0);
  std::vector<Requirement> reqs;
  std::size_t row = 0;
  for (std::size_t cls_index : interleave(counts)) {
    const auto& [cls, n] = roster[cls_index];
    Requirement r;
    r.id = "SR-" + std::to_string(1000 + row);
    r.project = projects[row % projects.size()];
    r.text = class_sentence(cls, per_class[cls_index], mix);
    r.labels["secreq"] = cls;
    reqs.push_back(std::move(r));
    per_class[cls_index] += 1;
    ++row;
  }
  return reqs;
}

void write_sample_data(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create directory " + dir + ": " + ec.message());
  auto write = [&](const std::string& name, const std::vector<Requirement>& reqs,
                   const std::vector<std::string>& schemes) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw io_error("cannot write " + dir + "/" + name);
    out << serialize_dataset(reqs, schemes);
  };
  write("promise.csv", sample_promise(), {"promise"});
  write("functional_quality.csv", sample_functional_quality(), {"functional", "quality"});
  write("secreq.csv", sample_secreq(), {"secreq"});
}

}  // namespace reqgrid
