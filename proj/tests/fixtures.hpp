#pragma once

#include "lasm/model.hpp"

#include <initializer_list>

namespace fixtures {

inline lasm::Point pt(std::initializer_list<int> v) {
  lasm::Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (int a : v) p[k++] = a;
  return p;
}

// Color 1 feeds colors 2, 3, 4 in place; color 2 (3, 4) returns to color 1 along +-e3 (+-e2, +-e1).
inline lasm::ModelSpec fig1(double m1 = 4.0 / 3.0, double m = 2.0) {
  std::vector<lasm::TopplingEntry> e;
  for (int j = 1; j <= 3; ++j) e.push_back({pt({0, 0, 0}), 0, j, 1.0});
  for (int j = 1; j <= 3; ++j) {
    int axis = 3 - j;
    for (int s : {-1, 1}) {
      lasm::Point x = lasm::Point::Zero(3);
      x[axis] = s;
      e.push_back({x, j, 0, 1.0});
    }
  }
  return lasm::make_model(3, 4, {m1, m, m, m}, e);
}

inline lasm::ModelSpec square(double m = 2.0) {
  return lasm::make_model(2, 1, {m},
                          {{pt({1, 0}), 0, 0, 1.0},
                           {pt({-1, 0}), 0, 0, 1.0},
                           {pt({0, 1}), 0, 0, 1.0},
                           {pt({0, -1}), 0, 0, 1.0}});
}

inline lasm::ModelSpec line(double m = 2.0) {
  return lasm::make_model(1, 1, {m}, {{pt({1}), 0, 0, 1.0}, {pt({-1}), 0, 0, 1.0}});
}

inline lasm::ModelSpec self_loop(double m = 2.0) {
  return lasm::make_model(1, 1, {m}, {{pt({0}), 0, 0, 1.0}});
}

}  // namespace fixtures
