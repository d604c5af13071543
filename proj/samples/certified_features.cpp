// Copyright 2026 The HALSX Authors. All Rights Reserved.
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

// Builds row features whose factor is strongly boundary close and prints
// the witness rows; then checks the printed k = 4 example as is.

#include <iostream>

#include "halsx/halsx.hpp"

using namespace halsx;

int main(int argc, char** argv) {
  const Index k = argc > 1 ? std::stoi(argv[1]) : 4;
  const CertifiedFeatures f = construct_certified_features(k, 0);
  std::cout << "k = " << k << ": X_r " << shape_str(f.X_r.rows(), f.X_r.cols()) << ", B_r "
            << shape_str(f.B_r.rows(), f.B_r.cols()) << "\nF_r = X_r B_r:\n"
            << f.F_r << "\n\n";
  std::cout << to_json(is_strongly_boundary_close(f.F_r)).dump(2) << "\n\n";

  const BoundaryCloseReport printed = is_strongly_boundary_close(paper_k4_F_r());
  std::cout << "printed 7-row k = 4 example: " << to_string(printed.verdict) << " ("
            << printed.reason << ")\n";
  const BoundaryCloseReport completed = is_strongly_boundary_close(paper_k4_completed().F_r);
  std::cout << "with one extra row per middle column: " << to_string(completed.verdict) << "\n";
  return 0;
}
