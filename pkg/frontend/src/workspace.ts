// Free-floating window manager: one draggable window per workflow module,
// a toolbar button per module kind, z-order on focus, layout persisted
// per manuscript in localStorage.

export interface WindowGeometry {
  left: number;
  top: number;
  width: number;
  height: number;
}

const DEFAULT_GEOMETRY: WindowGeometry = { left: 40, top: 60, width: 420, height: 360 };

export class ModuleWindow {
  readonly element: HTMLElement;
  readonly body: HTMLElement;
  private readonly badgeHost: HTMLElement;
  open = true;

  constructor(
    readonly moduleId: string,
    readonly kind: string,
    title: string,
    private readonly onFocus: (win: ModuleWindow) => void,
    private readonly onMoved: (win: ModuleWindow) => void,
  ) {
    this.element = document.createElement("section");
    this.element.className = `module-window module-${kind}`;
    this.element.dataset.moduleId = moduleId;

    const bar = document.createElement("header");
    bar.className = "window-titlebar";
    const label = document.createElement("span");
    label.className = "window-title";
    label.textContent = title;
    this.badgeHost = document.createElement("span");
    this.badgeHost.className = "window-badges";
    const close = document.createElement("button");
    close.className = "window-close";
    close.textContent = "×";
    close.addEventListener("click", () => this.hide());
    bar.append(label, this.badgeHost, close);

    this.body = document.createElement("div");
    this.body.className = "window-body";
    this.element.append(bar, this.body);

    this.element.addEventListener("pointerdown", () => this.onFocus(this));
    this.installDrag(bar);
    this.applyGeometry(DEFAULT_GEOMETRY);
  }

  private installDrag(handle: HTMLElement): void {
    let startX = 0;
    let startY = 0;
    let origin: WindowGeometry | null = null;

    const move = (event: PointerEvent) => {
      if (!origin) return;
      this.applyGeometry({
        ...origin,
        left: Math.max(0, origin.left + event.clientX - startX),
        top: Math.max(0, origin.top + event.clientY - startY),
      });
    };
    const up = () => {
      if (origin) this.onMoved(this);
      origin = null;
      document.removeEventListener("pointermove", move);
      document.removeEventListener("pointerup", up);
    };
    handle.addEventListener("pointerdown", (event) => {
      if ((event.target as HTMLElement).closest(".window-close")) return;
      startX = event.clientX;
      startY = event.clientY;
      origin = this.geometry();
      document.addEventListener("pointermove", move);
      document.addEventListener("pointerup", up);
    });
  }

  geometry(): WindowGeometry {
    return {
      left: parseInt(this.element.style.left || "0", 10),
      top: parseInt(this.element.style.top || "0", 10),
      width: parseInt(this.element.style.width || "0", 10),
      height: parseInt(this.element.style.height || "0", 10),
    };
  }

  applyGeometry(geometry: WindowGeometry): void {
    this.element.style.left = `${geometry.left}px`;
    this.element.style.top = `${geometry.top}px`;
    this.element.style.width = `${geometry.width}px`;
    this.element.style.height = `${geometry.height}px`;
  }

  setBadges(slots: string[]): void {
    this.badgeHost.textContent = "";
    for (const slot of slots) {
      const badge = document.createElement("span");
      badge.className = "link-badge";
      badge.textContent = slot;
      this.badgeHost.appendChild(badge);
    }
  }

  show(): void {
    this.open = true;
    this.element.style.display = "";
    this.onFocus(this);
  }

  hide(): void {
    this.open = false;
    this.element.style.display = "none";
  }

  flash(): void {
    this.element.classList.add("firing");
    setTimeout(() => this.element.classList.remove("firing"), 400);
  }
}

export class Workspace {
  readonly element: HTMLElement;
  private readonly windows = new Map<string, ModuleWindow>();
  private zCounter = 10;

  constructor(private readonly storageKey = "modoc-layout") {
    this.element = document.createElement("div");
    this.element.className = "workspace";
  }

  openWindow(moduleId: string, kind: string, title: string): ModuleWindow {
    const existing = this.windows.get(moduleId);
    if (existing) {
      existing.show();
      return existing;
    }
    const win = new ModuleWindow(
      moduleId,
      kind,
      title,
      (w) => this.bringToFront(w),
      () => this.persistLayout(),
    );
    const offset = this.windows.size * 28;
    win.applyGeometry({ ...DEFAULT_GEOMETRY, left: 40 + offset, top: 60 + offset });
    this.windows.set(moduleId, win);
    this.element.appendChild(win.element);
    this.restoreGeometry(win);
    this.bringToFront(win);
    return win;
  }

  window(moduleId: string): ModuleWindow | undefined {
    return this.windows.get(moduleId);
  }

  allWindows(): ModuleWindow[] {
    return [...this.windows.values()];
  }

  bringToFront(win: ModuleWindow): void {
    this.zCounter += 1;
    win.element.style.zIndex = String(this.zCounter);
  }

  zIndexOf(moduleId: string): number {
    const win = this.windows.get(moduleId);
    return win ? parseInt(win.element.style.zIndex || "0", 10) : -1;
  }

  private persistLayout(): void {
    const layout: Record<string, WindowGeometry> = {};
    for (const [moduleId, win] of this.windows) layout[moduleId] = win.geometry();
    try {
      localStorage.setItem(this.storageKey, JSON.stringify(layout));
    } catch {
      // storage may be unavailable; layout persistence is best-effort
    }
  }

  private restoreGeometry(win: ModuleWindow): void {
    try {
      const raw = localStorage.getItem(this.storageKey);
      if (!raw) return;
      const layout = JSON.parse(raw) as Record<string, WindowGeometry>;
      if (layout[win.moduleId]) win.applyGeometry(layout[win.moduleId]);
    } catch {
      // ignore corrupt layout blobs
    }
  }
}
