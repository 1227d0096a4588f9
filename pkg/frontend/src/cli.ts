import { MissingColumnError } from "./csv.js";
import { loadStyle } from "./style.js";
import { render, DEFAULT_FIGURES } from "./render.js";

// Usage: node dist/cli.js <report_dir> [figure ...] [--style file.json] [--out dir]
// With no figure names, renders the whole default set.

function main(argv: string[]): number {
  const positional: string[] = [];
  let stylePath: string | undefined;
  let outDir: string | undefined;

  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--style") {
      stylePath = argv[++i];
    } else if (a === "--out") {
      outDir = argv[++i];
    } else if (a === "--help" || a === "-h") {
      console.log(
        "usage: render <report_dir> [figure ...] [--style file.json] [--out dir]\n" +
          `figures: ${DEFAULT_FIGURES.join(", ")}`
      );
      return 0;
    } else {
      positional.push(a);
    }
  }

  if (positional.length === 0) {
    console.error("error: report directory required (--help for usage)");
    return 1;
  }
  const [reportDir, ...figures] = positional;

  try {
    const written = render(reportDir, figures.length ? figures : undefined, {
      style: loadStyle(stylePath),
      outDir,
    });
    for (const path of written) {
      console.log(path);
    }
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      console.error(`error: ${err.message}`);
    } else {
      console.error(`error: ${err instanceof Error ? err.message : err}`);
    }
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
