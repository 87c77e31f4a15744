// Copyright 2026 The radis Authors
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

// Regenerates the committed synthetic-model data files. They are part
// of the repository; rerunning this must be a no-op diff.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "radis/inversion.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  const auto model = radis::SyntheticModel::generate();
  {
    std::ofstream out(dir + "/synthetic_model_constants.csv");
    if (!out) {
      std::cerr << "cannot write to " << dir << '\n';
      return 1;
    }
    model.write_csv(out);
  }
  {
    // golden output at the box center, for the regression test
    const auto& box = model.prior_box();
    std::vector<double> x(box.dim()), y(model.output_dim());
    for (std::size_t d = 0; d < box.dim(); ++d) {
      x[d] = 0.5 * (box.lower()[d] + box.upper()[d]);
    }
    model.evaluate(x, y);
    std::ofstream out(dir + "/synthetic_model_golden.csv");
    out << "y\n";
    char buf[32];
    for (double v : y) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << '\n';
    }
  }
  std::cout << "wrote synthetic model constants and golden output to " << dir << '\n';
  return 0;
}
