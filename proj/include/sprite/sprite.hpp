#pragma once

// Umbrella header for the full pipeline toolkit.

#include "sprite/assets.hpp"
#include "sprite/backend.hpp"
#include "sprite/calibration.hpp"
#include "sprite/diagnostics.hpp"
#include "sprite/evaluation.hpp"
#include "sprite/geometry.hpp"
#include "sprite/http_backend.hpp"
#include "sprite/mock_backend.hpp"
#include "sprite/naming.hpp"
#include "sprite/pipeline.hpp"
#include "sprite/png_io.hpp"
#include "sprite/raster.hpp"
#include "sprite/scaffold.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/scene_graph.hpp"
#include "sprite/synthesis.hpp"
#include "sprite/synthetic.hpp"
#include "sprite/util.hpp"
#include "sprite/validate.hpp"
#include "sprite/wire.hpp"
