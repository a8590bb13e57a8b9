#pragma once

#include "isosdp/clique_sdp.hpp"
#include "isosdp/compat.hpp"
#include "isosdp/decider.hpp"
#include "isosdp/graph.hpp"
#include "isosdp/graph_io.hpp"
#include "isosdp/harness.hpp"
#include "isosdp/json_io.hpp"
#include "isosdp/linalg.hpp"
#include "isosdp/oracle.hpp"
#include "isosdp/sdp.hpp"
#include "isosdp/theta.hpp"
