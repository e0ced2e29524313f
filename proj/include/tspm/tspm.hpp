/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "tspm/chunker.hpp"
#include "tspm/contingency.hpp"
#include "tspm/core.hpp"
#include "tspm/date.hpp"
#include "tspm/error.hpp"
#include "tspm/ingest.hpp"
#include "tspm/miner.hpp"
#include "tspm/oracle.hpp"
#include "tspm/parallel.hpp"
#include "tspm/postcovid.hpp"
#include "tspm/query.hpp"
#include "tspm/screening.hpp"
#include "tspm/synth.hpp"
#include "tspm/tseq_io.hpp"
