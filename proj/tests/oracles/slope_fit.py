# Copyright 2026 The ldpagg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Log-log least squares on a deterministic rippled power law, via scipy.

The series is v(t) = t^-0.6 * (1 + 0.3 sin t) on t = 10, 13, ..., 10000
(every integer of the form round(10^(1 + k/20))), fitted on [30, 5000].
"""
import json
import sys

import numpy as np
from scipy import stats


def main():
    ts = sorted({int(round(10 ** (1 + k / 20))) for k in range(61)})
    vs = [t ** -0.6 * (1 + 0.3 * np.sin(t)) for t in ts]
    sel = [(t, v) for t, v in zip(ts, vs) if 30 <= t <= 5000]
    x = np.log10([t for t, _ in sel])
    y = np.log10([v for _, v in sel])
    fit = stats.linregress(x, y)
    q = stats.t.ppf(0.975, len(x) - 2)
    json.dump({"points": len(x), "slope": fit.slope, "intercept": fit.intercept,
               "r2": fit.rvalue ** 2, "ci_low": fit.slope - q * fit.stderr,
               "ci_high": fit.slope + q * fit.stderr}, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
