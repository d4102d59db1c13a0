#pragma once

#include <string>
#include <vector>

// Per-set correlations for the second group of semantic datasets, as printed
// (two decimals) in the published table.
struct PublishedRow {
  const char* set;
  double pearson;
  double spearman;
};

inline const std::vector<PublishedRow>& group2_rows() {
  static const std::vector<PublishedRow> rows = {
      {"Animals11", 0.01, 0.00},    {"Animals5", -0.15, -0.08},    {"Birds", -0.94, -0.95},
      {"Clothing1", -0.68, -0.78},  {"Clothing2", -0.42, -0.53},   {"Fish", -1.00, -1.00},
      {"Fruit1", -0.24, -0.29},     {"Fruit2", -0.53, -0.43},      {"Fruit3", -0.52, -0.64},
      {"SIMLEX", -0.99, -1.00},     {"Tools", -0.95, -0.87},       {"Vegetables1", -0.20, -0.08},
      {"Vegetables2", -0.46, -0.57}, {"Vehicles1", -0.97, -0.71},  {"Vehicles2", -0.87, -0.82},
      {"Weapons1", -0.85, -0.87},   {"Weapons2", -0.96, -0.74},
  };
  return rows;
}
