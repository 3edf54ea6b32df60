// Copyright 2026 The dprp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPRP_NORMAL_H_
#define DPRP_NORMAL_H_

namespace dprp {

// Standard normal density, CDF and log-CDF. The CDF is computed from
// std::erfc, which is accurate to a few ulp over the whole real line; the
// log-CDF switches to the asymptotic Mills-ratio series where erfc would
// underflow.
double NormalPdf(double x);
double NormalCdf(double x);
double NormalLogCdf(double x);

// 2 * Phi(x) - 1 for x >= 0, i.e. Pr(|Z| <= x).
double HalfNormalCdf(double x);

}  // namespace dprp

#endif  // DPRP_NORMAL_H_
