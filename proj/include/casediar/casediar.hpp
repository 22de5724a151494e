// casediar/casediar.hpp

// Copyright 2026  case-diar authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CASEDIAR_CASEDIAR_HPP_
#define CASEDIAR_CASEDIAR_HPP_

#include "casediar/cluster.hpp"
#include "casediar/commands.hpp"
#include "casediar/config.hpp"
#include "casediar/content.hpp"
#include "casediar/features.hpp"
#include "casediar/gradcheck.hpp"
#include "casediar/graph.hpp"
#include "casediar/models.hpp"
#include "casediar/params.hpp"
#include "casediar/pipeline.hpp"
#include "casediar/scoring.hpp"
#include "casediar/synthdata.hpp"
#include "casediar/tensor.hpp"

#endif  // CASEDIAR_CASEDIAR_HPP_
