# Copyright 2026 the lsdd-doa authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS-IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Direction-of-arrival estimation for wearable microphone arrays.

The heavy lifting lives in the C++ extension module; this package re-exports
its surface: steering vectors, the STFT front end, the LSDD/LSDDe/dSDD/dSDDe
estimators with their direct-path-dominance tests, the block-based
evaluation harness, and the plane-wave scene simulator.
"""

from lsdd_doa._core import (  # noqa: F401
    ArrayGeometry,
    BinRecord,
    BlockReport,
    DoaGrid,
    EvalConfig,
    GroundTruth,
    RunReport,
    SceneSpec,
    Speaker,
    SteeringSet,
    TFGrid,
    TruthFrame,
    Vec3,
    __version__,
    analyze,
    band_similarity_map,
    circular_error,
    energy_weight,
    evaluate_run,
    ideal_spectrum,
    percentile_threshold,
    read_wav,
    similarity,
    snr_at_mics,
    steering_vector,
    stft,
    synthesize,
    to_room_frame,
    write_wav,
)

__all__ = [
    "ArrayGeometry",
    "BinRecord",
    "BlockReport",
    "DoaGrid",
    "EvalConfig",
    "GroundTruth",
    "RunReport",
    "SceneSpec",
    "Speaker",
    "SteeringSet",
    "TFGrid",
    "TruthFrame",
    "Vec3",
    "analyze",
    "band_similarity_map",
    "circular_error",
    "energy_weight",
    "evaluate_run",
    "ideal_spectrum",
    "percentile_threshold",
    "read_wav",
    "similarity",
    "snr_at_mics",
    "steering_vector",
    "stft",
    "synthesize",
    "to_room_frame",
    "write_wav",
]
