import init, { render_total_svg, mn_summary, transport_summary } from "./pkg/catmn_web.js";

const $ = (id) => document.getElementById(id);

function show(target, f, asHtml) {
  try {
    const out = f();
    if (asHtml) {
      target.innerHTML = out;
    } else {
      target.textContent = out;
    }
    target.classList.remove("error");
  } catch (err) {
    target.textContent = String(err);
    target.classList.add("error");
  }
}

function refresh() {
  const seed = Number($("seed").value) >>> 0;
  const maxBase = Number($("max-base").value) >>> 0;
  const maxFiber = Number($("max-fiber").value) >>> 0;
  show($("drawing"), () => render_total_svg(seed, maxBase, maxFiber), true);
  show($("mn"), () => mn_summary(seed, maxBase, maxFiber));
  show($("transport"), () => transport_summary(seed, maxBase, maxFiber, $("mode").value));
}

await init();
$("draw").addEventListener("click", refresh);
$("mode").addEventListener("change", refresh);
$("next").addEventListener("click", () => {
  $("seed").value = Number($("seed").value) + 1;
  refresh();
});
refresh();
