#include "cpsarch/json_io.hpp"

#include <algorithm>

#include <json.hpp>

namespace cpsarch {

using nlohmann::json;

namespace {

const json& require_field(const json& obj, const char* key,
                          const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(std::string("model document: missing '") + key +
                      "' in " + where);
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const char* where) {
  const json& value = require_field(obj, key, where);
  if (!value.is_string()) {
    throw SchemaError(std::string("model document: '") + key + "' in " +
                      where + " must be a string");
  }
  return value.get<std::string>();
}

int optional_port(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return 0;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw SchemaError(std::string("model document: '") + key +
                      "' must be a nonnegative integer");
  }
  return static_cast<int>(it->get<long long>());
}

}  // namespace

Model parse_json_model(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaError("model document: top level must be a JSON object");
  }

  std::string version = require_string(doc, "schema_version", "document");
  if (version != kModelSchemaVersion) {
    throw SchemaError("model document: unsupported schema_version '" +
                      version + "' (expected \"" +
                      std::string(kModelSchemaVersion) + "\")");
  }

  const json& jmodel = require_field(doc, "model", "document");
  if (!jmodel.is_object()) {
    throw SchemaError("model document: 'model' must be an object");
  }

  Model model;
  model.name = require_string(jmodel, "name", "model");

  if (auto it = jmodel.find("blocks"); it != jmodel.end()) {
    if (!it->is_array()) {
      throw SchemaError("model document: 'blocks' must be an array");
    }
    for (const json& jb : *it) {
      if (!jb.is_object()) {
        throw SchemaError("model document: block entries must be objects");
      }
      Block b;
      b.id = require_string(jb, "id", "block");
      b.name = require_string(jb, "name", "block");
      b.block_type = require_string(jb, "block_type", "block");
      b.parent = require_string(jb, "parent", "block");
      if (auto jp = jb.find("params"); jp != jb.end()) {
        if (!jp->is_object()) {
          throw SchemaError("model document: block 'params' must be an object");
        }
        for (const auto& [key, value] : jp->items()) {
          if (!value.is_string()) {
            throw SchemaError("model document: param '" + key +
                              "' must be a string");
          }
          b.params.emplace(key, value.get<std::string>());
        }
      }
      model.blocks.push_back(std::move(b));
    }
  }

  if (auto it = jmodel.find("connections"); it != jmodel.end()) {
    if (!it->is_array()) {
      throw SchemaError("model document: 'connections' must be an array");
    }
    for (const json& jc : *it) {
      if (!jc.is_object()) {
        throw SchemaError(
            "model document: connection entries must be objects");
      }
      Connection c;
      c.src_block = require_string(jc, "src_block", "connection");
      c.dst_block = require_string(jc, "dst_block", "connection");
      c.src_port = optional_port(jc, "src_port");
      c.dst_port = optional_port(jc, "dst_port");
      model.connections.push_back(std::move(c));
    }
  }

  ValidationReport report = validate(model);
  if (!report.ok()) {
    throw InvalidModel("model '" + model.name + "': " +
                       report.violations.front().kind + " (" +
                       report.violations.front().subject + ")");
  }
  return model;
}

std::string export_json_model(const Model& model) {
  std::vector<Block> blocks = model.blocks;
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.id < b.id; });
  std::vector<Connection> connections = model.connections;
  std::sort(connections.begin(), connections.end());

  json jblocks = json::array();
  for (const Block& b : blocks) {
    json jb;
    jb["id"] = b.id;
    jb["name"] = b.name;
    jb["block_type"] = b.block_type;
    jb["parent"] = b.parent;
    if (!b.params.empty()) jb["params"] = b.params;
    jblocks.push_back(std::move(jb));
  }

  json jconns = json::array();
  for (const Connection& c : connections) {
    jconns.push_back({{"src_block", c.src_block},
                      {"src_port", c.src_port},
                      {"dst_block", c.dst_block},
                      {"dst_port", c.dst_port}});
  }

  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["model"] = {{"name", model.name},
                  {"blocks", std::move(jblocks)},
                  {"connections", std::move(jconns)}};
  return doc.dump(2) + "\n";
}

}  // namespace cpsarch
