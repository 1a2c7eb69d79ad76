#include "eea/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "eea/experiment.hpp"

namespace eea {

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, result.ptr);
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "experiment,agent,seed,episode,steps,return,ms\n";
  for (const auto& rec : records) {
    out << rec.experiment << "," << rec.agent << "," << rec.seed << "," << rec.episode << ","
        << rec.steps << "," << format_double(rec.ret) << "," << rec.wall_ms << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "episode,mean,stderr,n\n";
  for (const auto& row : rows) {
    out << row.episode << "," << format_double(row.mean) << "," << format_double(row.stderr_)
        << "," << row.n << "\n";
  }
  if (!out) throw std::runtime_error("write_summary_csv: write failed for " + path);
}

std::vector<RunRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "experiment,agent,seed,episode,steps,return,ms") {
    throw std::runtime_error("read_csv: unexpected header in " + path);
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    RunRecord rec;
    std::getline(fields, rec.experiment, ',');
    std::getline(fields, rec.agent, ',');
    std::getline(fields, field, ',');
    rec.seed = std::stoi(field);
    std::getline(fields, field, ',');
    rec.episode = std::stoi(field);
    std::getline(fields, field, ',');
    rec.steps = std::stol(field);
    std::getline(fields, field, ',');
    rec.ret = std::stod(field);
    std::getline(fields, field, ',');
    rec.wall_ms = std::stol(field);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace eea
