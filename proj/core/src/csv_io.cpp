#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "dada/datagen.hpp"

namespace dada {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line, const char* what) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw CsvError(line, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

PartitionedDataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_header = false;

  PartitionedDataset dataset;
  std::unordered_map<std::string, std::size_t> index_of;

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(raw);

    if (!have_header) {
      if (fields.size() < 4 || fields[0] != "user_id" || fields[1] != "split" || fields[2] != "y") {
        throw CsvError(line_no, "expected header user_id,split,y,f0,...");
      }
      dim = fields.size() - 3;
      for (std::size_t d = 0; d < dim; ++d) {
        if (fields[3 + d] != "f" + std::to_string(d)) {
          throw CsvError(line_no, "feature column " + std::to_string(d) + " must be named f" +
                                      std::to_string(d));
        }
      }
      have_header = true;
      dataset.feature_dim = dim;
      continue;
    }

    if (fields.size() != dim + 3) {
      throw CsvError(line_no, "expected " + std::to_string(dim + 3) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    const std::string id(fields[0]);
    if (id.empty()) throw CsvError(line_no, "empty user_id");
    const std::string_view split = fields[1];
    if (split != "train" && split != "test") {
      throw CsvError(line_no, "unknown split '" + std::string(split) + "'");
    }
    const double yv = parse_number(fields[2], line_no, "label");
    if (yv != 1.0 && yv != -1.0) {
      throw CsvError(line_no, "label must be -1 or 1, got '" + std::string(fields[2]) + "'");
    }
    std::vector<double> x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = parse_number(fields[3 + d], line_no, "feature");

    auto [it, inserted] = index_of.try_emplace(id, dataset.users.size());
    if (inserted) dataset.users.emplace_back();
    UserData& user = dataset.users[it->second];
    if (split == "train") {
      user.train_x.append_row(x);
      user.train_y.push_back(static_cast<Label>(yv));
    } else {
      user.test_x.append_row(x);
      user.test_y.push_back(static_cast<Label>(yv));
    }
  }

  if (dataset.users.empty()) throw CsvError(0, "no users");
  for (const auto& [id, k] : index_of) {
    if (dataset.users[k].num_train() == 0) {
      throw CsvError(0, "user '" + id + "' has no training rows");
    }
  }
  assign_confidences(dataset);
  return dataset;
}

PartitionedDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string to_csv(const PartitionedDataset& dataset) {
  std::string out = "user_id,split,y";
  for (std::size_t d = 0; d < dataset.feature_dim; ++d) out += ",f" + std::to_string(d);
  out += '\n';
  auto rows = [&](std::size_t k, const char* split, const Matrix& x, const std::vector<Label>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      out += std::to_string(k);
      out += ',';
      out += split;
      out += ',';
      out += y[i] > 0 ? "1" : "-1";
      for (double v : x.row(i)) {
        out += ',';
        append_number(out, v);
      }
      out += '\n';
    }
  };
  for (std::size_t k = 0; k < dataset.users.size(); ++k) {
    rows(k, "train", dataset.users[k].train_x, dataset.users[k].train_y);
    rows(k, "test", dataset.users[k].test_x, dataset.users[k].test_y);
  }
  return out;
}

void write_csv(const PartitionedDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv(dataset);
}

}  // namespace dada
