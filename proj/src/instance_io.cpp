#include "crn/instance_io.hpp"

#include <fstream>
#include <stdexcept>

namespace crn {

using nlohmann::json;

json instance_to_json(const ProblemInstance& inst) {
  json access = json::array();
  for (const auto& l : inst.access_links()) access.push_back({l.su, l.channel});
  json interference = json::array();
  for (const auto& l : inst.interference_links()) interference.push_back({l.su, l.pu, l.gain});

  json doc;
  doc["n_su"] = inst.n_su();
  doc["n_free"] = inst.n_free();
  doc["n_active"] = inst.n_active();
  doc["access"] = std::move(access);
  doc["interference"] = std::move(interference);
  doc["priority"] = std::vector<double>(inst.priorities().begin(), inst.priorities().end());
  doc["theta"] = std::vector<double>(inst.thresholds().begin(), inst.thresholds().end());
  doc["metadata"] = inst.metadata();
  return doc;
}

ProblemInstance instance_from_json(const json& doc) {
  const auto n_su = doc.at("n_su").get<std::size_t>();
  const auto n_free = doc.at("n_free").get<std::size_t>();
  const auto n_active = doc.at("n_active").get<std::size_t>();

  std::vector<AccessLink> access;
  for (const auto& e : doc.at("access")) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("instance: access entries are [i, a]");
    access.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
  }
  std::vector<InterferenceLink> interference;
  for (const auto& e : doc.at("interference")) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("instance: interference entries are [i, b, g]");
    interference.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  }
  auto metadata = doc.contains("metadata") ? doc.at("metadata") : json::object();
  return ProblemInstance::from_sparse(n_su, n_free, n_active, access, interference,
                                      doc.at("priority").get<std::vector<double>>(),
                                      doc.at("theta").get<std::vector<double>>(), std::move(metadata));
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  write_json_file(instance_to_json(inst), path);
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

json assignment_to_json(const Assignment& assign) {
  json links = json::array();
  for (const auto& l : assign.links()) links.push_back({l.su, l.channel});
  json doc;
  doc["links"] = std::move(links);
  doc["connected"] = assign.connected();
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace crn
